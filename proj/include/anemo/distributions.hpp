#pragma once

// The three candidate wind-speed marginal families. Parameterizations:
//   Weibull(shape a, scale b):   f(x) = (a/b)(x/b)^(a-1) exp(-(x/b)^a)
//   Gamma(shape a, rate r):      f(x) = r^a x^(a-1) exp(-r x) / Gamma(a)
//   Lognormal(mu, sigma):        log x ~ N(mu, sigma^2)

#include <cmath>
#include <string>

#include "anemo/error.hpp"
#include "anemo/rng.hpp"
#include "anemo/special_functions.hpp"

namespace anemo {

enum class DistributionKind { weibull, gamma, lognormal };

inline const char* to_string(DistributionKind k) {
    switch (k) {
        case DistributionKind::weibull: return "weibull";
        case DistributionKind::gamma: return "gamma";
        case DistributionKind::lognormal: return "lognormal";
    }
    return "?";
}

inline DistributionKind distribution_kind_from_string(const std::string& s) {
    if (s == "weibull") return DistributionKind::weibull;
    if (s == "gamma") return DistributionKind::gamma;
    if (s == "lognormal" || s == "lnorm") return DistributionKind::lognormal;
    throw DomainError("unknown distribution kind '" + s + "'");
}

/// A parametric positive-support distribution (two parameters per family).
struct Distribution {
    DistributionKind kind = DistributionKind::weibull;
    double p1 = 1.0;  // weibull shape / gamma shape / lognormal mu
    double p2 = 1.0;  // weibull scale / gamma rate  / lognormal sigma

    void validate() const {
        switch (kind) {
            case DistributionKind::weibull:
                if (!(p1 > 0.0 && p2 > 0.0))
                    throw DomainError("weibull: shape and scale must be > 0");
                break;
            case DistributionKind::gamma:
                if (!(p1 > 0.0 && p2 > 0.0))
                    throw DomainError("gamma: shape and rate must be > 0");
                break;
            case DistributionKind::lognormal:
                if (!(p2 > 0.0)) throw DomainError("lognormal: sigma must be > 0");
                break;
        }
    }
};

inline double pdf(const Distribution& d, double x) {
    d.validate();
    if (x < 0.0) throw DomainError("pdf: requires x >= 0");
    switch (d.kind) {
        case DistributionKind::weibull: {
            if (x == 0.0) return d.p1 > 1.0 ? 0.0 : (d.p1 == 1.0 ? 1.0 / d.p2 : INFINITY);
            const double z = x / d.p2;
            return (d.p1 / d.p2) * std::pow(z, d.p1 - 1.0) * std::exp(-std::pow(z, d.p1));
        }
        case DistributionKind::gamma: {
            if (x == 0.0) return d.p1 > 1.0 ? 0.0 : (d.p1 == 1.0 ? d.p2 : INFINITY);
            return std::exp(d.p1 * std::log(d.p2) + (d.p1 - 1.0) * std::log(x) - d.p2 * x
                            - ln_gamma(d.p1));
        }
        case DistributionKind::lognormal: {
            if (x == 0.0) return 0.0;
            const double z = (std::log(x) - d.p1) / d.p2;
            return std::exp(-0.5 * z * z) / (x * d.p2 * 2.50662827463100050242);
        }
    }
    throw DomainError("pdf: unknown kind");
}

inline double log_pdf(const Distribution& d, double x) {
    if (!(x > 0.0)) throw DomainError("log_pdf: requires x > 0");
    switch (d.kind) {
        case DistributionKind::weibull: {
            const double z = x / d.p2;
            return std::log(d.p1 / d.p2) + (d.p1 - 1.0) * std::log(z) - std::pow(z, d.p1);
        }
        case DistributionKind::gamma:
            return d.p1 * std::log(d.p2) + (d.p1 - 1.0) * std::log(x) - d.p2 * x
                 - ln_gamma(d.p1);
        case DistributionKind::lognormal: {
            const double z = (std::log(x) - d.p1) / d.p2;
            return -0.5 * z * z - std::log(x * d.p2) - 0.91893853320467274178;
        }
    }
    throw DomainError("log_pdf: unknown kind");
}

inline double cdf(const Distribution& d, double x) {
    d.validate();
    if (x < 0.0) throw DomainError("cdf: requires x >= 0");
    if (x == 0.0) return 0.0;
    switch (d.kind) {
        case DistributionKind::weibull:
            return -std::expm1(-std::pow(x / d.p2, d.p1));
        case DistributionKind::gamma:
            return gamma_p(d.p1, d.p2 * x);
        case DistributionKind::lognormal:
            return normal_cdf((std::log(x) - d.p1) / d.p2);
    }
    throw DomainError("cdf: unknown kind");
}

inline double quantile(const Distribution& d, double p) {
    d.validate();
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: requires p in (0,1)");
    switch (d.kind) {
        case DistributionKind::weibull:
            return d.p2 * std::pow(-std::log1p(-p), 1.0 / d.p1);
        case DistributionKind::gamma:
            return gamma_p_inverse(d.p1, p) / d.p2;
        case DistributionKind::lognormal:
            return std::exp(d.p1 + d.p2 * normal_quantile(p));
    }
    throw DomainError("quantile: unknown kind");
}

/// Gamma(shape, 1) variate by the Marsaglia-Tsang squeeze method.
inline double sample_standard_gamma(double shape, Rng& rng) {
    if (shape < 1.0) {
        // boost: X_a = X_{a+1} * U^(1/a)
        const double u = rng.uniform();
        return sample_standard_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = sample_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

inline double sample(const Distribution& d, Rng& rng) {
    d.validate();
    switch (d.kind) {
        case DistributionKind::weibull:
            return d.p2 * std::pow(-std::log(rng.uniform()), 1.0 / d.p1);
        case DistributionKind::gamma:
            return sample_standard_gamma(d.p1, rng) / d.p2;
        case DistributionKind::lognormal:
            return std::exp(d.p1 + d.p2 * sample_normal(rng));
    }
    throw DomainError("sample: unknown kind");
}

}  // namespace anemo

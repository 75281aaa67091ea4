#include "stopset/analytics.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace stopset {

namespace {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(name) + " outside [0,1]");
}

// log of C(eta, i) q^i p^(eta-i); requires 0 < q < 1.
double log_binom_term(std::size_t eta, std::size_t i, double log_q, double log_p) {
    return std::lgamma(static_cast<double>(eta) + 1.0) -
           std::lgamma(static_cast<double>(i) + 1.0) -
           std::lgamma(static_cast<double>(eta - i) + 1.0) +
           static_cast<double>(i) * log_q + static_cast<double>(eta - i) * log_p;
}

}  // namespace

double pr_ref_single(double delta, double epsilon) {
    check_probability(delta, "delta");
    check_probability(epsilon, "epsilon");
    if (delta == 1.0 && epsilon == 1.0)
        throw std::invalid_argument("pr_ref undefined at delta = epsilon = 1");
    return (1.0 - epsilon) / (1.0 - epsilon * delta);
}

double pr_ref_receivers(const std::vector<double>& deltas, double epsilon) {
    if (deltas.empty() || deltas.size() > 20)
        throw std::invalid_argument("pr_ref_receivers: need 1 <= m <= 20 receivers");
    for (double d : deltas) check_probability(d, "delta");
    check_probability(epsilon, "epsilon");

    const std::uint32_t m = static_cast<std::uint32_t>(deltas.size());
    double sum = 0.0;
    for (std::uint32_t subset = 1; subset < (std::uint32_t{1} << m); ++subset) {
        double prod = 1.0;
        int bits = 0;
        for (std::uint32_t i = 0; i < m; ++i) {
            if ((subset >> i) & 1) {
                prod *= deltas[i];
                ++bits;
            }
        }
        const double denom = 1.0 - epsilon * prod;
        if (denom == 0.0)
            throw std::invalid_argument("pr_ref_receivers: undefined corner (all ones)");
        const double term = (1.0 - epsilon) / denom;
        sum += (bits % 2 == 1) ? term : -term;
    }
    return sum;
}

double pr_ref_collab(double delta, const std::vector<double>& epsilons) {
    if (epsilons.empty()) throw std::invalid_argument("pr_ref_collab: need l >= 1");
    check_probability(delta, "delta");
    double eps = 1.0;
    for (double e : epsilons) {
        check_probability(e, "epsilon");
        eps *= e;
    }
    return pr_ref_single(delta, eps);
}

double pr_ref_general(const std::vector<double>& deltas, const std::vector<double>& epsilons) {
    if (epsilons.empty()) throw std::invalid_argument("pr_ref_general: need l >= 1");
    double eps = 1.0;
    for (double e : epsilons) {
        check_probability(e, "epsilon");
        eps *= e;
    }
    return pr_ref_receivers(deltas, eps);
}

double pr_d_geq(std::size_t beta, std::size_t alpha, std::size_t eta, double pr_ref) {
    if (alpha == 0 || eta == 0) throw std::invalid_argument("pr_d_geq: alpha, eta positive");
    if (beta < 1 || beta > alpha * eta)
        throw std::invalid_argument("pr_d_geq: beta outside [1, alpha*eta]");
    check_probability(pr_ref, "pr_ref");

    const std::size_t c = (beta + alpha - 1) / alpha;  // need at least c erased packets
    const double p = pr_ref;      // packet received
    const double q = 1.0 - p;     // packet erased
    if (q == 0.0) return 0.0;
    if (p == 0.0) return 1.0;

    const double log_q = std::log(q);
    const double log_p = std::log(p);
    const double mode = static_cast<double>(eta) * q;

    // Sum the smaller tail directly, relative to its largest term, streaming
    // until added terms stop mattering.
    if (static_cast<double>(c) > mode) {
        // upper tail: i = c .. eta, terms decreasing
        const double anchor = log_binom_term(eta, c, log_q, log_p);
        double rel = 1.0;
        double log_term = anchor;
        for (std::size_t i = c + 1; i <= eta; ++i) {
            log_term += std::log(static_cast<double>(eta - i + 1) / static_cast<double>(i)) +
                        log_q - log_p;
            const double t = std::exp(log_term - anchor);
            rel += t;
            if (t < rel * 1e-17) break;
        }
        return std::exp(anchor + std::log(rel));
    }
    // lower tail: i = c-1 down to 0, terms decreasing
    const double anchor = log_binom_term(eta, c - 1, log_q, log_p);
    double rel = 1.0;
    double log_term = anchor;
    for (std::size_t i = c - 1; i > 0; --i) {
        log_term += std::log(static_cast<double>(i) / static_cast<double>(eta - i + 1)) +
                    log_p - log_q;
        const double t = std::exp(log_term - anchor);
        rel += t;
        if (t < rel * 1e-17) break;
    }
    return 1.0 - std::exp(anchor + std::log(rel));
}

double expected_d(double pr_ref, std::size_t n) {
    check_probability(pr_ref, "pr_ref");
    if (n == 0) throw std::invalid_argument("expected_d: n must be positive");
    return (1.0 - pr_ref) * static_cast<double>(n);
}

double geometric_max_pmf(const std::vector<double>& lambdas, std::uint64_t t) {
    if (t < 1) throw std::invalid_argument("geometric_max_pmf: t >= 1");
    if (lambdas.empty()) throw std::invalid_argument("geometric_max_pmf: need parameters");
    double at_t = 1.0, at_prev = 1.0;
    for (double lambda : lambdas) {
        if (!(lambda > 0.0 && lambda <= 1.0))
            throw std::invalid_argument("geometric_max_pmf: lambda outside (0,1]");
        at_t *= 1.0 - std::pow(1.0 - lambda, static_cast<double>(t));
        at_prev *= 1.0 - std::pow(1.0 - lambda, static_cast<double>(t - 1));
    }
    return at_t - at_prev;
}

AttackBounds attack_bounds(double expected_dof, std::size_t block_count, double c_a) {
    if (block_count < 1) throw std::invalid_argument("attack_bounds: L >= 1");
    if (!(c_a > 0.0)) throw std::invalid_argument("attack_bounds: C_A must be positive");
    const double inv_l = 1.0 / static_cast<double>(block_count);
    AttackBounds b;
    b.log2_lower = expected_dof + std::log2(1.0 - std::exp2(-inv_l)) + std::log2(c_a);
    b.log2_upper = expected_dof - inv_l + std::log2(c_a);
    return b;
}

std::vector<GridRow> security_grid(std::size_t beta, std::size_t alpha, std::size_t eta,
                                   std::size_t n, const std::vector<double>& deltas,
                                   const std::vector<double>& epsilons) {
    std::vector<GridRow> rows;
    rows.reserve(deltas.size() * epsilons.size());
    for (double d : deltas) {
        for (double e : epsilons) {
            if (d == 1.0 && e == 1.0) continue;  // undefined corner
            GridRow row;
            row.delta = d;
            row.epsilon = e;
            row.pr_ref = pr_ref_single(d, e);
            row.pr_d_geq = pr_d_geq(beta, alpha, eta, row.pr_ref);
            row.expected_d = expected_d(row.pr_ref, n);
            rows.push_back(row);
        }
    }
    return rows;
}

ContourResult threshold_contour(std::size_t beta, std::size_t alpha, std::size_t eta,
                                const std::vector<double>& deltas,
                                const std::vector<double>& epsilons) {
    if (epsilons.size() < 2)
        throw std::invalid_argument("threshold_contour: need at least 2 epsilon rows");
    ContourResult result;
    for (double d : deltas) {
        bool found = false;
        double prev_eps = 0.0, prev_val = 0.0;
        bool have_prev = false;
        for (double e : epsilons) {
            if (d == 1.0 && e == 1.0) break;
            const double val = pr_d_geq(beta, alpha, eta, pr_ref_single(d, e));
            if (have_prev && ((prev_val <= 0.5 && val >= 0.5) || (prev_val >= 0.5 && val <= 0.5))) {
                double eps_star = prev_eps;
                if (val != prev_val)
                    eps_star = prev_eps + (0.5 - prev_val) * (e - prev_eps) / (val - prev_val);
                result.points.push_back({d, eps_star});
                found = true;
                break;
            }
            prev_eps = e;
            prev_val = val;
            have_prev = true;
        }
        if (!found) result.skipped_deltas.push_back(d);
    }
    return result;
}

}  // namespace stopset

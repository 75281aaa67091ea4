#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stopset {

// Closed-form probability that the eavesdropper coalition obtains one packet
// after all legitimate retransmissions. Single receiver, single
// eavesdropper: (1 - eps) / (1 - eps * delta). Undefined at delta=eps=1.
double pr_ref_single(double delta, double epsilon);

// m receivers, one eavesdropper, by inclusion-exclusion over receiver
// subsets T: sum over nonempty T of (-1)^{|T|+1} (1-eps)/(1-eps prod delta).
// Every term carries eps in the denominator, including the full set. m <= 20.
double pr_ref_receivers(const std::vector<double>& deltas, double epsilon);

// l collaborating eavesdroppers, one receiver: the single-eavesdropper form
// evaluated at the product of the epsilons.
double pr_ref_collab(double delta, const std::vector<double>& epsilons);

// m receivers and l eavesdroppers: the receiver form at eps' = prod eps_j.
double pr_ref_general(const std::vector<double>& deltas, const std::vector<double>& epsilons);

// Pr(D >= beta) for D = alpha * Binomial(eta, 1 - pr_ref): the complement of
// the binomial lower tail up to ceil(beta/alpha) - 1 erased packets.
// Evaluated through streaming log-domain terms, stable for eta up to 1e5.
double pr_d_geq(std::size_t beta, std::size_t alpha, std::size_t eta, double pr_ref);

// E[D] = (1 - pr_ref) * n, the equivocation H(X|Z) in the |R| = N-k regime.
double expected_d(double pr_ref, std::size_t n);

// pmf of the maximum of independent geometric variables with success
// parameters lambdas, at integer t >= 1.
double geometric_max_pmf(const std::vector<double>& lambdas, std::uint64_t t);

// Expected-complexity band of a guessing attack relative to the base attack
// cost c_a, reported in the log2 domain:
//   2^{E[D]} (1 - 2^{-1/L}) C_A <= C_PL <= 2^{E[D]} 2^{-1/L} C_A,
// coinciding at L = 1 with 2^{E[D]-1} C_A.
struct AttackBounds {
    double log2_lower = 0.0;
    double log2_upper = 0.0;
};
AttackBounds attack_bounds(double expected_dof, std::size_t block_count, double c_a);

struct GridRow {
    double delta = 0.0;
    double epsilon = 0.0;
    double pr_ref = 0.0;
    double pr_d_geq = 0.0;
    double expected_d = 0.0;
};

// Pr(D >= beta) and E[D] over a (delta, epsilon) lattice for the
// single-receiver single-eavesdropper channel; the undefined (1,1) corner is
// skipped.
std::vector<GridRow> security_grid(std::size_t beta, std::size_t alpha, std::size_t eta,
                                   std::size_t n, const std::vector<double>& deltas,
                                   const std::vector<double>& epsilons);

struct ContourPoint {
    double delta = 0.0;
    double epsilon = 0.0;
};

struct ContourResult {
    std::vector<ContourPoint> points;
    std::vector<double> skipped_deltas;  // columns with no 0.5 crossing
};

// For each delta column, the epsilon where Pr(D >= beta) crosses one half,
// linearly interpolated between lattice values.
ContourResult threshold_contour(std::size_t beta, std::size_t alpha, std::size_t eta,
                                const std::vector<double>& deltas,
                                const std::vector<double>& epsilons);

}  // namespace stopset

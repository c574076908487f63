#pragma once

#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "qsearch/search.hpp"

namespace qsearch {

// Dense operators for one stage of the recursion, restricted to registers
// stage..1 (outer registers sit in the correct branch, so the oracle reduces
// to a reflection about the truncated target). Everything is brute force on
// purpose: this module cross-checks the fast paths.
struct DenseStage {
    int stage = 0;
    std::vector<long long> iterates; // t_1..t_stage used in the build

    Eigen::MatrixXcd W;      // W_stage on the register subspace
    Eigen::MatrixXcd W_prev; // W_{stage-1}
    Eigen::MatrixXcd S_psi;  // reflection about psi_stage

    // Columns: products over registers stage..1 picking psi_j or psi_perp_j
    // per register (bit j-1 of the column index set = the perp choice).
    // Every operator above preserves this 2^stage-dimensional space.
    Eigen::MatrixXcd invariant_basis;

    // Projectors expressed in invariant_basis coordinates. P_S projects onto
    // the psi_stage slice; P_W is the mirror of W_{stage-1}, built as the
    // image of the psi_{stage-1} slice under (S_{psi_{stage-1}} W_{stage-2})^t.
    Eigen::MatrixXcd P_S;
    Eigen::MatrixXcd P_W;
};

// iterates override t_1..t_stage; empty resolves round-1 values from the
// schedule. Total dimension of registers stage..1 is capped at 2^12.
DenseStage build_dense(const SearchSpec& spec, int stage,
                       std::vector<long long> iterates = {});

struct EigenvalueCluster {
    double value = 0.0; // mean of the cluster members
    int multiplicity = 0;
};

struct AngleSpectrum {
    std::vector<double> eigenvalues; // raw, ascending
    std::vector<EigenvalueCluster> clusters;
    double cluster_tolerance = 0.0;
};

// Eigenvalues of P_S P_W P_S restricted to range(P_S): squared cosines of
// the principal angles between the two mirrors. Inputs must be Hermitian
// idempotent within 1e-10. Adjacent eigenvalues closer than
// cluster_tolerance merge into one cluster; the raw list stays available so
// a broken degeneracy cannot hide.
AngleSpectrum principal_angle_spectrum(const Eigen::MatrixXcd& P_S,
                                       const Eigen::MatrixXcd& P_W,
                                       double cluster_tolerance = 1e-8);

nlohmann::json spectrum_to_json(const AngleSpectrum& spectrum);

struct BlockCheckReport {
    int stage = 0;        // the stage whose conditional mirror is analyzed
    long long t = 0;      // power applied around the projector
    double gamma = 0.0;   // rotation angle entering the expectations
    double expected_aligned = 0.0;    // cos^2(2 t gamma)
    double expected_orthogonal = 0.0; // sin^2(2 t gamma)
    double dev_aligned = 0.0;    // max |aligned block - expected * I|
    double dev_orthogonal = 0.0; // max |orthogonal block - expected * I|
    double dev_cross = 0.0;      // max |C C^dag - cos^2 sin^2 * I|
};

// Verifies that Q = (S W)^t P_psi (W S)^t, the projector carried to the next
// stage, has scalar diagonal blocks in the psi/psi_perp split of register
// stage-1, i.e. it acts as the same 2x2 matrix on every lower-register
// configuration. `stage` is the stage consuming Q, so the operator lives on
// registers stage-1..1; iterates override t_1..t_{stage-1} (the last entry,
// the power t, may be 0).
BlockCheckReport diagonal_block_check(const SearchSpec& spec, int stage,
                                      std::vector<long long> iterates = {});

// Success probability of round 1 by dense evolution: builds the round
// operator as an explicit matrix, applies it to the product start state and
// measures the outermost register against its target value. Shares no
// kernels with the statevector module. n <= 10.
double brute_force_success(const SearchSpec& spec,
                           std::vector<long long> iterates = {});

struct BruteForceResult {
    double success_probability = 0.0;
    // Boundary k: final readout matches the target on registers m..m-k.
    std::vector<double> prefix_probabilities;
};

// Full multi-round process as density-matrix evolution: unitary rounds,
// dephase-and-trace for the discarded measurements, fresh lower registers,
// exact final distribution. Independent of both the statevector kernels and
// the rank-2 reduction used by the exact-expectation mode. n <= 10.
BruteForceResult brute_force_search(const SearchSpec& spec);

} // namespace qsearch

#include "qsearch/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qsearch/errors.hpp"

namespace qsearch {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

constexpr int kMaxDenseQubits = 12;

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

Vec kron(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

Mat mat_pow(Mat base, long long t) {
    Mat result = Mat::Identity(base.rows(), base.cols());
    while (t > 0) {
        if (t & 1)
            result = result * base;
        base = base * base;
        t >>= 1;
    }
    return result;
}

Vec local_vector(const LocalState& s) {
    Vec v(static_cast<Eigen::Index>(s.dim()));
    for (std::uint64_t k = 0; k < s.dim(); ++k)
        v[static_cast<Eigen::Index>(k)] = s.amplitudes()[k];
    return v;
}

// Operators on the subspace of registers top..1, register 1 owning the
// least-significant bits (matching the statevector layout).
struct Workspace {
    const SearchSpec* spec = nullptr;
    int top = 0;
    Eigen::Index dim = 0;
    std::vector<int> qubits_below; // [r-1]: qubit offset of register r

    Workspace(const SearchSpec& s, int top_register) : spec(&s),
                                                       top(top_register) {
        const auto& part = s.partition;
        if (top_register < 1 || top_register > part.stage_count())
            throw ConfigError("stage index out of range");
        int total = 0;
        for (int r = 1; r <= top_register; ++r) {
            qubits_below.push_back(total);
            total += part.size(r);
        }
        if (total > kMaxDenseQubits)
            throw ResourceCapError(
                "dense analysis over " + std::to_string(total) +
                " qubits exceeds the 2^" + std::to_string(kMaxDenseQubits) +
                " cap");
        dim = Eigen::Index{1} << total;
    }

    std::uint64_t truncated_target() const {
        const auto& part = spec->partition;
        const int bits = qubits_below[static_cast<std::size_t>(top) - 1] +
                         part.size(top);
        return spec->target & ((std::uint64_t{1} << bits) - 1);
    }

    Mat lift(int reg, const Mat& local) const {
        const int low_bits = qubits_below[static_cast<std::size_t>(reg) - 1];
        const int reg_bits = spec->partition.size(reg);
        const Eigen::Index high =
            dim >> (low_bits + reg_bits);
        const Eigen::Index low = Eigen::Index{1} << low_bits;
        return kron(Mat::Identity(high, high),
                    kron(local, Mat::Identity(low, low)));
    }

    Mat diffusion(int reg) const {
        const Vec psi = local_vector(
            spec->locals[static_cast<std::size_t>(reg) - 1]);
        const Mat local = Mat::Identity(psi.size(), psi.size()) -
                          2.0 * (psi * psi.adjoint());
        return lift(reg, local);
    }

    Mat oracle() const {
        Mat o = Mat::Identity(dim, dim);
        const auto x = static_cast<Eigen::Index>(truncated_target());
        o(x, x) = -1.0;
        return o;
    }

    // W_k from the recursion, using iterates t_1..t_k.
    Mat w(int k, const std::vector<long long>& iterates) const {
        if (k == 0)
            return oracle();
        const Mat inner = w(k - 1, iterates);
        const Mat s = diffusion(k);
        const Mat fwd = mat_pow(s * inner, iterates[static_cast<std::size_t>(k) - 1]);
        const Mat bwd = mat_pow(inner * s, iterates[static_cast<std::size_t>(k) - 1]);
        return fwd * s * bwd;
    }

    // Columns spanning the per-register {psi, psi_perp} products; bit r-1 of
    // the column index picks psi_perp on register r.
    Mat invariant_basis() const {
        const auto& part = spec->partition;
        Mat basis(dim, Eigen::Index{1} << top);
        for (std::uint64_t choice = 0;
             choice < (std::uint64_t{1} << top); ++choice) {
            Vec col = Vec::Ones(1);
            for (int r = 1; r <= top; ++r) {
                const LocalState& base =
                    spec->locals[static_cast<std::size_t>(r) - 1];
                const LocalState factor =
                    ((choice >> (r - 1)) & 1u)
                        ? base.orthogonal_against_basis(
                              part.register_value(spec->target, r))
                        : base;
                col = kron(local_vector(factor), col);
            }
            basis.col(static_cast<Eigen::Index>(choice)) = col;
        }
        return basis;
    }

    Vec product_start() const {
        Vec v = Vec::Ones(1);
        for (int r = 1; r <= top; ++r)
            v = kron(local_vector(spec->locals[static_cast<std::size_t>(r) - 1]),
                     v);
        return v;
    }
};

std::vector<long long> resolve_round1_iterates(const SearchSpec& spec,
                                               int count,
                                               std::vector<long long> given) {
    if (!given.empty()) {
        if (static_cast<int>(given.size()) != count)
            throw ConfigError("expected " + std::to_string(count) +
                              " iterates");
        for (long long v : given)
            if (v < 1)
                throw ConfigError("iterates must be at least 1");
        return given;
    }
    const auto plan = resolve_plan(spec);
    const auto& round1 = plan.rounds.front().iterates;
    if (static_cast<int>(round1.size()) < count)
        throw ConfigError("schedule provides fewer stages than requested");
    return {round1.begin(), round1.begin() + count};
}

void check_projector(const Mat& p, const char* name) {
    const double herm = (p - p.adjoint()).cwiseAbs().maxCoeff();
    const double idem = (p * p - p).cwiseAbs().maxCoeff();
    if (herm > 1e-10 || idem > 1e-10)
        throw NumericError(std::string(name) +
                           " is not a projector (hermiticity deviation " +
                           std::to_string(herm) + ", idempotency deviation " +
                           std::to_string(idem) + ")");
}

double cos2_reduced(long double t_scale, double gamma) {
    constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const long double c =
        std::cos(std::fmod(t_scale * static_cast<long double>(gamma), two_pi));
    return static_cast<double>(c * c);
}

} // namespace

DenseStage build_dense(const SearchSpec& spec, int stage,
                       std::vector<long long> iterates) {
    spec.validate();
    if (stage < 1)
        throw ConfigError("stage index must be at least 1");
    const Workspace ws(spec, stage);
    const auto t = resolve_round1_iterates(spec, stage, std::move(iterates));

    DenseStage out;
    out.stage = stage;
    out.iterates = t;
    out.W = ws.w(stage, t);
    out.W_prev = ws.w(stage - 1, t);
    out.S_psi = ws.diffusion(stage);
    out.invariant_basis = ws.invariant_basis();

    const Mat& b = out.invariant_basis;
    const Vec psi_top = local_vector(
        spec.locals[static_cast<std::size_t>(stage) - 1]);
    const Mat p_s_full = ws.lift(
        stage, psi_top * psi_top.adjoint());
    out.P_S = b.adjoint() * p_s_full * b;

    if (stage == 1) {
        // Base case: W_0's mirror is the target state itself.
        Mat p_w_full = Mat::Zero(ws.dim, ws.dim);
        const auto x = static_cast<Eigen::Index>(ws.truncated_target());
        p_w_full(x, x) = 1.0;
        out.P_W = b.adjoint() * p_w_full * b;
    } else {
        const Vec psi_prev = local_vector(
            spec.locals[static_cast<std::size_t>(stage) - 2]);
        const Mat p_prev = ws.lift(stage - 1, psi_prev * psi_prev.adjoint());
        const Mat u = mat_pow(ws.diffusion(stage - 1) * ws.w(stage - 2, t),
                              t[static_cast<std::size_t>(stage) - 2]);
        out.P_W = b.adjoint() * (u * p_prev * u.adjoint()) * b;
    }
    return out;
}

AngleSpectrum principal_angle_spectrum(const Mat& p_s, const Mat& p_w,
                                       double cluster_tolerance) {
    if (p_s.rows() != p_s.cols() || p_w.rows() != p_w.cols() ||
        p_s.rows() != p_w.rows())
        throw ConfigError("projectors must be square and equally sized");
    check_projector(p_s, "first projector");
    check_projector(p_w, "second projector");

    // Orthonormal basis of range(P_S) from its near-1 eigenvectors.
    Eigen::SelfAdjointEigenSolver<Mat> range_solver(p_s);
    std::vector<Eigen::Index> range_cols;
    for (Eigen::Index k = 0; k < p_s.rows(); ++k)
        if (range_solver.eigenvalues()[k] > 0.5)
            range_cols.push_back(k);
    if (range_cols.empty())
        throw NumericError("first projector has an empty range");
    Mat range(p_s.rows(), static_cast<Eigen::Index>(range_cols.size()));
    for (std::size_t k = 0; k < range_cols.size(); ++k)
        range.col(static_cast<Eigen::Index>(k)) =
            range_solver.eigenvectors().col(range_cols[k]);

    Eigen::SelfAdjointEigenSolver<Mat> solver(range.adjoint() * p_w * range);

    AngleSpectrum spectrum;
    spectrum.cluster_tolerance = cluster_tolerance;
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k)
        spectrum.eigenvalues.push_back(solver.eigenvalues()[k]);
    std::sort(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end());

    for (double value : spectrum.eigenvalues) {
        if (!spectrum.clusters.empty() &&
            value - (spectrum.clusters.back().value /
                     spectrum.clusters.back().multiplicity) <=
                cluster_tolerance) {
            spectrum.clusters.back().value += value;
            ++spectrum.clusters.back().multiplicity;
        } else {
            spectrum.clusters.push_back(EigenvalueCluster{value, 1});
        }
    }
    for (auto& c : spectrum.clusters)
        c.value /= c.multiplicity;
    return spectrum;
}

nlohmann::json spectrum_to_json(const AngleSpectrum& spectrum) {
    nlohmann::json j;
    j["eigenvalues"] = spectrum.eigenvalues;
    j["cluster_tolerance"] = spectrum.cluster_tolerance;
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : spectrum.clusters)
        clusters.push_back(
            {{"value", c.value}, {"multiplicity", c.multiplicity}});
    j["clusters"] = std::move(clusters);
    return j;
}

BlockCheckReport diagonal_block_check(const SearchSpec& spec, int stage,
                                      std::vector<long long> iterates) {
    spec.validate();
    if (stage < 2)
        throw ConfigError(
            "the conditional mirror exists from stage 2 upward");
    const int inner_top = stage - 1;
    const Workspace ws(spec, inner_top);

    std::vector<long long> t;
    if (!iterates.empty()) {
        if (static_cast<int>(iterates.size()) != inner_top)
            throw ConfigError("expected " + std::to_string(inner_top) +
                              " iterates");
        t = std::move(iterates);
        for (std::size_t k = 0; k + 1 < t.size(); ++k)
            if (t[k] < 1)
                throw ConfigError("inner iterates must be at least 1");
        if (t.back() < 0)
            throw ConfigError("the projector power may not be negative");
    } else {
        t = resolve_round1_iterates(spec, inner_top, {});
    }

    // Q = (S W)^t P_psi (W S)^t on registers stage-1..1.
    const Vec psi = local_vector(
        spec.locals[static_cast<std::size_t>(inner_top) - 1]);
    const Mat p_psi = ws.lift(inner_top, psi * psi.adjoint());
    const Mat u = mat_pow(ws.diffusion(inner_top) * ws.w(inner_top - 1, t),
                          t.back());
    const Mat q = u * p_psi * u.adjoint();

    const Mat basis = ws.invariant_basis();
    const Mat q_b = basis.adjoint() * q * basis;

    // Rows/columns with bit inner_top-1 clear form the psi block.
    const Eigen::Index half = q_b.rows() / 2;
    std::vector<Eigen::Index> aligned, orthogonal;
    for (Eigen::Index c = 0; c < q_b.rows(); ++c)
        (((c >> (inner_top - 1)) & 1) ? orthogonal : aligned).push_back(c);
    auto block = [&](const std::vector<Eigen::Index>& rows,
                     const std::vector<Eigen::Index>& cols) {
        Mat out(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j)
                out(static_cast<Eigen::Index>(i),
                    static_cast<Eigen::Index>(j)) = q_b(rows[i], cols[j]);
        return out;
    };

    BlockCheckReport rep;
    rep.stage = stage;
    rep.t = t.back();
    std::vector<double> thetas = spec.overlap_angles();
    thetas.resize(static_cast<std::size_t>(inner_top));
    const std::vector<long long> inner(t.begin(), t.end() - 1);
    rep.gamma = gamma_schedule(thetas, inner).back();
    rep.expected_aligned =
        cos2_reduced(2.0L * static_cast<long double>(rep.t), rep.gamma);
    rep.expected_orthogonal = 1.0 - rep.expected_aligned;

    const Mat eye = Mat::Identity(half, half);
    rep.dev_aligned = (block(aligned, aligned) - rep.expected_aligned * eye)
                          .cwiseAbs()
                          .maxCoeff();
    rep.dev_orthogonal =
        (block(orthogonal, orthogonal) - rep.expected_orthogonal * eye)
            .cwiseAbs()
            .maxCoeff();
    const Mat cross = block(aligned, orthogonal);
    rep.dev_cross = (cross * cross.adjoint() -
                     rep.expected_aligned * rep.expected_orthogonal * eye)
                        .cwiseAbs()
                        .maxCoeff();
    return rep;
}

double brute_force_success(const SearchSpec& spec,
                           std::vector<long long> iterates) {
    spec.validate();
    const auto& part = spec.partition;
    if (part.total_qubits() > 10)
        throw ResourceCapError("dense round evolution is capped at 10 qubits");
    const int m = part.stage_count();
    const Workspace ws(spec, m);
    const auto t = resolve_round1_iterates(spec, m, std::move(iterates));

    const Mat round = mat_pow(ws.diffusion(m) * ws.w(m - 1, t),
                              t[static_cast<std::size_t>(m) - 1]);
    const Vec final_state = round * ws.product_start();

    const std::uint64_t x_m = part.register_value(spec.target, m);
    const int off = part.offset(m);
    double p = 0.0;
    for (std::uint64_t low = 0; low < (std::uint64_t{1} << off); ++low)
        p += std::norm(
            final_state[static_cast<Eigen::Index>((x_m << off) | low)]);
    return p;
}

BruteForceResult brute_force_search(const SearchSpec& spec) {
    spec.validate();
    const auto& part = spec.partition;
    if (part.total_qubits() > 10)
        throw ResourceCapError("dense process evolution is capped at 10 qubits");
    const int m = part.stage_count();
    const auto plan = resolve_plan(spec);
    const Workspace ws(spec, m);

    const Vec start = ws.product_start();
    Mat rho = start * start.adjoint();

    for (int j = 1; j <= m; ++j) {
        const auto& round = plan.rounds[static_cast<std::size_t>(j) - 1];
        const Mat g = mat_pow(
            ws.diffusion(round.stages) * ws.w(round.stages - 1, round.iterates),
            round.iterates.back());
        rho = g * rho * g.adjoint();

        if (j == m)
            break;
        // Measure-and-discard of the registers below the amplified one,
        // then fresh lower states: trace out the low block, tensor back.
        const int keep_from = round.stages; // lowest register kept
        const int low_bits = part.offset(keep_from);
        const Eigen::Index low_dim = Eigen::Index{1} << low_bits;
        const Eigen::Index high_dim = rho.rows() / low_dim;
        Mat kept = Mat::Zero(high_dim, high_dim);
        for (Eigen::Index h1 = 0; h1 < high_dim; ++h1)
            for (Eigen::Index h2 = 0; h2 < high_dim; ++h2) {
                std::complex<double> acc{0.0, 0.0};
                for (Eigen::Index low = 0; low < low_dim; ++low)
                    acc += rho(h1 * low_dim + low, h2 * low_dim + low);
                kept(h1, h2) = acc;
            }
        Vec fresh = Vec::Ones(1);
        for (int r = 1; r < keep_from; ++r)
            fresh = kron(local_vector(
                             spec.locals[static_cast<std::size_t>(r) - 1]),
                         fresh);
        rho = kron(kept, Mat(fresh * fresh.adjoint()));
    }

    BruteForceResult out;
    out.prefix_probabilities.assign(static_cast<std::size_t>(m), 0.0);
    for (Eigen::Index v = 0; v < rho.rows(); ++v) {
        const double p = rho(v, v).real();
        const auto value = static_cast<std::uint64_t>(v);
        for (int k = 0; k < m; ++k) {
            const int r = m - k;
            if (part.register_value(value, r) !=
                part.register_value(spec.target, r))
                break;
            out.prefix_probabilities[static_cast<std::size_t>(k)] += p;
        }
    }
    out.success_probability = out.prefix_probabilities.back();
    return out;
}

} // namespace qsearch

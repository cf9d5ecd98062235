#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pairpump/errors.hpp"
#include "pairpump/free_basis.hpp"
#include "pairpump/grid.hpp"
#include "pairpump/parallel.hpp"
#include "pairpump/potential.hpp"
#include "pairpump/units.hpp"

namespace pairpump {

/// Positive branch modes followed by negative branch modes, each truncated to
/// the same momentum rank.
struct HamiltonianBasis {
    GridPtr grid;
    std::vector<FreeMode> modes;

    std::size_t size() const noexcept { return modes.size(); }
};

inline HamiltonianBasis make_hamiltonian_basis(const GridPtr& grid, std::size_t n_keep) {
    HamiltonianBasis b{grid, {}};
    for (auto branch : {Branch::positive, Branch::negative}) {
        auto set = build_basis(grid, n_keep, branch);
        b.modes.insert(b.modes.end(), set.modes.begin(), set.modes.end());
    }
    return b;
}

/// Matrix of H = H_free + V in the free-mode basis. V couples modes through
/// its discrete Fourier coefficients: <a|V|b> = chi_a.chi_b * V~(k_a - k_b).
inline Eigen::MatrixXcd build_hamiltonian(const HamiltonianBasis& basis, std::span<const double> v) {
    const SpatialGrid& g = *basis.grid;
    const std::size_t n = g.size();
    if (v.size() != n) throw ArgumentError("build_hamiltonian: potential length mismatch");

    // V~(d) = (1/n) sum_j V_j exp(-i d (2pi/L) z_j) = (-1)^d FFT(V)[d mod n] / n
    ComplexBuffer vk(v.begin(), v.end());
    g.fft().forward(vk);
    for (std::size_t m = 0; m < n; ++m) vk[m] *= detail::origin_sign(m) / static_cast<double>(n);

    const std::size_t dim = basis.size();
    std::vector<std::pair<double, double>> chi(dim);
    std::vector<long> idx(dim);
    for (std::size_t a = 0; a < dim; ++a) {
        chi[a] = mode_spinor(basis.modes[a].k, basis.modes[a].branch);
        idx[a] = g.signed_index(basis.modes[a].slot);
    }
    const long nl = static_cast<long>(n);
    Eigen::MatrixXcd h(dim, dim);
    for (std::size_t b = 0; b < dim; ++b) {
        for (std::size_t a = 0; a < dim; ++a) {
            long d = (idx[a] - idx[b]) % nl;
            if (d < 0) d += nl;
            const double spin = chi[a].first * chi[b].first + chi[a].second * chi[b].second;
            h(a, b) = spin * vk[static_cast<std::size_t>(d)];
        }
        h(b, b) += basis.modes[b].energy;
    }
    // enforce exact Hermiticity against rounding in V~
    Eigen::MatrixXcd hs = 0.5 * (h + h.adjoint());
    return hs;
}

inline Eigen::MatrixXcd build_hamiltonian(const GridPtr& grid, std::span<const double> v) {
    return build_hamiltonian(make_hamiltonian_basis(grid, grid->size()), v);
}

struct EigenDecomposition {
    Eigen::VectorXd values;  ///< ascending
    Eigen::MatrixXcd vectors; ///< orthonormal columns
};

inline EigenDecomposition eigen_decompose(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols()) throw ArgumentError("eigen_decompose: matrix is not square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Position-space probability of an eigenvector (basis coefficients) within
/// |z| <= half_width.
inline double in_well_probability(const HamiltonianBasis& basis, const Eigen::Ref<const Eigen::VectorXcd>& vec,
                                  double half_width) {
    const SpatialGrid& g = *basis.grid;
    ComplexBuffer up(g.size()), lo(g.size());
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const auto& m = basis.modes[a];
        const auto [s1, s2] = mode_spinor(m.k, m.branch);
        up[m.slot] += vec[static_cast<Eigen::Index>(a)] * s1;
        lo[m.slot] += vec[static_cast<Eigen::Index>(a)] * s2;
    }
    detail::momentum_to_position_inplace(g, up);
    detail::momentum_to_position_inplace(g, lo);
    double p = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        if (std::abs(g.position(j)) <= half_width) p += std::norm(up[j]) + std::norm(lo[j]);
    return p * g.dz();
}

enum class ScanParameter { width, depth };

inline const char* scan_parameter_name(ScanParameter p) { return p == ScanParameter::width ? "width" : "depth"; }

/// A one-parameter family of static wells: either the width varies at fixed
/// depth or the depth varies at fixed width.
struct SpectrumFamily {
    GridPtr grid;
    ScanParameter parameter = ScanParameter::width;
    double fixed_depth = 2.53 * kRestEnergy;     ///< used for width scans
    double fixed_width = 10.0 * kComptonWavelength; ///< used for depth scans
    double edge = 0.3 * kComptonWavelength;
    std::size_t n_keep = 0;                      ///< 0 means the full lattice
    double window = 1.6 * kRestEnergy;           ///< |E| range kept in scan output
    double localization_margin = 2.0 * kComptonWavelength;

    WellShape shape(double value) const {
        return parameter == ScanParameter::width ? WellShape{fixed_depth, value, edge}
                                                 : WellShape{value, fixed_width, edge};
    }
    double localization_half_width(double value) const { return 0.5 * shape(value).width + localization_margin; }
    std::size_t basis_size() const { return n_keep == 0 ? grid->size() : n_keep; }
};

/// In-gap eigenstate retained for branch tracking.
struct GapState {
    double energy = 0.0;
    double localization = 0.0;
    int branch = -1;
    Eigen::VectorXcd vector;
};

struct SpectrumSample {
    double value = 0.0;
    std::vector<double> eigenvalues; ///< ascending, within the family window
    std::vector<GapState> gap_states; ///< ascending energy, -c^2 < E < c^2
};

struct BranchTrack {
    int id = -1;
    std::vector<std::size_t> samples; ///< sample indices, consecutive
    std::vector<double> energies;
    std::vector<double> overlaps; ///< overlap with the previous sample (first entry 1)
    bool left_gap = false;        ///< track ends before the last sample
};

struct SpectrumScan {
    SpectrumFamily family;
    std::vector<double> values;
    std::vector<SpectrumSample> samples;
    std::vector<BranchTrack> branches;
};

namespace detail {

struct SolvedPoint {
    EigenDecomposition eig;
    HamiltonianBasis basis;
};

inline SolvedPoint solve_family(const SpectrumFamily& fam, double value) {
    auto basis = make_hamiltonian_basis(fam.grid, fam.basis_size());
    const auto v = sample_potential(fam.shape(value), *fam.grid);
    return {eigen_decompose(build_hamiltonian(basis, v)), std::move(basis)};
}

inline SpectrumSample make_sample(const SpectrumFamily& fam, double value) {
    auto solved = solve_family(fam, value);
    SpectrumSample s;
    s.value = value;
    const auto& ev = solved.eig.values;
    const double hw = fam.localization_half_width(value);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double e = ev[i];
        if (std::abs(e) <= fam.window) s.eigenvalues.push_back(e);
        if (e > -kRestEnergy && e < kRestEnergy) {
            GapState g;
            g.energy = e;
            g.vector = solved.eig.vectors.col(i);
            g.localization = in_well_probability(solved.basis, g.vector, hw);
            s.gap_states.push_back(std::move(g));
        }
    }
    return s;
}

} // namespace detail

/// Overlap below which a branch continuation is considered ambiguous.
inline constexpr double kBranchOverlapThreshold = 0.5;

/// Diagonalize the family at each (ascending) value and link in-gap states
/// across consecutive values by maximal eigenvector overlap.
inline SpectrumScan scan(const SpectrumFamily& family, std::vector<double> values, int workers = 1) {
    if (!std::is_sorted(values.begin(), values.end())) throw ArgumentError("scan values must be ascending");
    SpectrumScan out{family, values, std::vector<SpectrumSample>(values.size()), {}};
    parallel_for(values.size(), workers, [&](std::size_t i) { out.samples[i] = detail::make_sample(family, values[i]); });

    std::map<int, std::size_t> alive; // branch id -> index into out.branches
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        auto& cur = out.samples[i];
        std::vector<bool> taken(cur.gap_states.size(), false);
        std::map<int, std::size_t> next_alive;
        if (i > 0) {
            const auto& prev = out.samples[i - 1];
            // candidate (overlap, prev state, cur state), greedily assigned
            struct Cand { double ov; std::size_t a, b; };
            std::vector<Cand> cands;
            for (std::size_t a = 0; a < prev.gap_states.size(); ++a)
                for (std::size_t b = 0; b < cur.gap_states.size(); ++b) {
                    const double ov = std::abs(prev.gap_states[a].vector.dot(cur.gap_states[b].vector));
                    if (ov > kBranchOverlapThreshold) cands.push_back({ov, a, b});
                }
            std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.ov > y.ov; });
            std::vector<bool> prev_done(prev.gap_states.size(), false);
            for (const auto& c : cands) {
                if (prev_done[c.a] || taken[c.b]) continue;
                prev_done[c.a] = taken[c.b] = true;
                const int id = prev.gap_states[c.a].branch;
                auto& tr = out.branches[alive.at(id)];
                tr.samples.push_back(i);
                tr.energies.push_back(cur.gap_states[c.b].energy);
                tr.overlaps.push_back(c.ov);
                cur.gap_states[c.b].branch = id;
                next_alive[id] = alive.at(id);
            }
            for (const auto& [id, pos] : alive)
                if (!next_alive.count(id)) out.branches[pos].left_gap = true;
        }
        for (std::size_t b = 0; b < cur.gap_states.size(); ++b) {
            if (taken[b]) continue;
            const int id = static_cast<int>(out.branches.size());
            BranchTrack tr;
            tr.id = id;
            tr.samples.push_back(i);
            tr.energies.push_back(cur.gap_states[b].energy);
            tr.overlaps.push_back(1.0);
            cur.gap_states[b].branch = id;
            next_alive[id] = out.branches.size();
            out.branches.push_back(std::move(tr));
        }
        alive = std::move(next_alive);
    }
    return out;
}

struct DivingPoint {
    int branch = -1;
    double value = 0.0;    ///< parameter value where the branch meets -c^2
    double residual = 0.0; ///< (E + c^2) at that value, a.u.
    int iterations = 0;
};

struct BranchIssue {
    int branch = -1;
    double last_value = 0.0;
    double last_energy = 0.0;
    std::string reason;
};

struct DivingAnalysis {
    std::vector<DivingPoint> points; ///< ascending by value
    std::vector<BranchIssue> issues; ///< tracking ambiguities, reported not guessed

    std::vector<double> values() const {
        std::vector<double> v;
        for (const auto& p : points) v.push_back(p.value);
        return v;
    }
};

/// Stop criterion for the crossing refinement, |E + c^2| below this fraction of c^2.
inline constexpr double kDivingTolerance = 1e-4;

namespace detail {

/// Secant refinement of the parameter where a branch meets -c^2, restricted to
/// (lo, hi]. Each trial value is re-diagonalized and the branch continued by
/// maximal overlap with the previous continuation.
inline std::optional<DivingPoint> refine_crossing(const SpectrumFamily& fam, const BranchTrack& tr,
                                                  const SpectrumScan& sc, double hi, std::string& why) {
    const std::size_t last = tr.samples.back();
    const GapState* last_state = nullptr;
    for (const auto& g : sc.samples[last].gap_states)
        if (g.branch == tr.id) last_state = &g;
    if (!last_state) { why = "missing branch state"; return std::nullopt; }

    auto f_of = [](double e) { return (e + kRestEnergy) / kRestEnergy; };
    double x2 = sc.values[last], f2 = f_of(last_state->energy);
    double x1 = x2, f1 = f2;
    bool have_two = tr.samples.size() >= 2;
    if (have_two) {
        x1 = sc.values[tr.samples[tr.samples.size() - 2]];
        f1 = f_of(tr.energies[tr.energies.size() - 2]);
    }
    double lo = x2;
    Eigen::VectorXcd ref = last_state->vector;
    const double scale = std::max(std::abs(hi), std::abs(lo));
    for (int it = 1; it <= 60; ++it) {
        double x = std::numeric_limits<double>::quiet_NaN();
        if (have_two && f2 != f1) x = x2 - f2 * (x2 - x1) / (f2 - f1);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        const auto solved = solve_family(fam, x);
        const auto overlaps = (solved.eig.vectors.adjoint() * ref).cwiseAbs().eval();
        Eigen::Index j = 0;
        const double ov = overlaps.maxCoeff(&j);
        if (ov < kBranchOverlapThreshold) {
            // continuation dissolved: the crossing lies below x
            hi = x;
        } else {
            const double f = f_of(solved.eig.values[j]);
            if (std::abs(f) < kDivingTolerance)
                return DivingPoint{tr.id, x, f * kRestEnergy, it};
            if (f > 0.0) {
                lo = x;
                ref = solved.eig.vectors.col(j);
            } else {
                hi = x;
            }
            x1 = x2; f1 = f2;
            x2 = x; f2 = f;
            have_two = true;
        }
        if (hi - lo < 1e-12 * std::max(1.0, scale)) break;
    }
    why = "crossing refinement did not reach |E + c^2| < 1e-4 c^2 on a tracked state";
    return std::nullopt;
}

} // namespace detail

/// Parameter values where tracked in-gap branches leave the gap through -c^2.
inline DivingAnalysis diving_points(const SpectrumScan& sc, int workers = 1) {
    struct Job { std::size_t branch; double hi; };
    std::vector<Job> jobs;
    DivingAnalysis out;
    for (std::size_t b = 0; b < sc.branches.size(); ++b) {
        const auto& tr = sc.branches[b];
        if (!tr.left_gap) continue;
        const std::size_t last = tr.samples.back();
        if (tr.energies.back() > 0.0) {
            out.issues.push_back({tr.id, sc.values[last], tr.energies.back(),
                                  "branch lost inside the upper half of the gap (overlap < 0.5)"});
            continue;
        }
        jobs.push_back({b, sc.values[last + 1]});
    }
    std::vector<std::optional<DivingPoint>> found(jobs.size());
    std::vector<std::string> why(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t i) {
        found[i] = detail::refine_crossing(sc.family, sc.branches[jobs[i].branch], sc, jobs[i].hi, why[i]);
    });
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& tr = sc.branches[jobs[i].branch];
        if (found[i]) out.points.push_back(*found[i]);
        else out.issues.push_back({tr.id, sc.values[tr.samples.back()], tr.energies.back(), why[i]});
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const DivingPoint& a, const DivingPoint& b) { return a.value < b.value; });
    return out;
}

} // namespace pairpump

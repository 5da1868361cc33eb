#pragma once
// Exact and Monte Carlo Lebesgue volumes of the height polytopes, projected
// to cotree coordinates (which makes the spanning-tree normalization
// automatic).  The exact engine is the classic recursive facet decomposition
// V = (1/k) sum_i c0_i * Vol(F_i projected) / |a_ij|, with vertices
// enumerated to prune non-facets and detect lower-dimensional inputs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "honeyvol/cells.hpp"
#include "honeyvol/honeycombs.hpp"
#include "honeyvol/rng.hpp"

namespace hv {

struct DimensionTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Polytope {
    int k = 0;                                           // ambient dimension
    std::vector<std::string> names;                      // coordinate names
    std::vector<std::pair<Rat, std::vector<Rat>>> rows;  // c0 + cf . x >= 0 (closure)
    // affine height expression per reduced edge, in the k coordinates
    std::vector<std::pair<Rat, std::vector<Rat>>> height_expr;
};

struct VolumeEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::string method;  // "exact" | "mc" | "empty"
    long long samples = 0;
    std::uint64_t seed = 0;
    bool exact = false;
    Rat exact_value = 0;
    std::string note;
};

// ------------------------------------------------------------ construction

// H-representation of the feasible heights over the cotree S (cone closure
// plus the [0,1] box for every edge height).
inline Polytope polytope_from(const StructureGraph& G, const Divergence& phi,
                              const std::vector<int>& S) {
    const int k = static_cast<int>(S.size());
    Polytope P;
    P.k = k;
    for (int e : S) P.names.push_back("L" + std::to_string(e));
    // affine solve: w(x) = w0 + sum_j x_j * wj with x_j the height of S[j]
    std::vector<Rat> zero_vals(k, Rat(0));
    Flow w0 = solve_flow(G.fg, phi, S, zero_vals);
    std::vector<Flow> wj(k);
    Divergence zero_phi(G.nv(), Rat(0));
    for (int j = 0; j < k; ++j) {
        std::vector<Rat> vals(k, Rat(0));
        vals[j] = G.flow_of_height(S[j], Rat(1));
        wj[j] = solve_flow(G.fg, zero_phi, S, vals);
    }
    P.height_expr.assign(G.ne(), {Rat(0), std::vector<Rat>(k, Rat(0))});
    for (int e = 0; e < G.ne(); ++e) {
        P.height_expr[e].first = G.height(e, w0[e]);
        for (int j = 0; j < k; ++j) P.height_expr[e].second[j] = G.height(e, wj[j][e]);
    }
    auto push_row = [&](Rat c0, std::vector<Rat> cf) {
        P.rows.emplace_back(std::move(c0), std::move(cf));
    };
    for (int e = 0; e < G.ne(); ++e) {
        const auto& [h0, hf] = P.height_expr[e];
        push_row(h0, hf);  // L_e >= 0
        std::vector<Rat> neg(k);
        for (int j = 0; j < k; ++j) neg[j] = -hf[j];
        push_row(Rat(1) - h0, std::move(neg));  // L_e <= 1
    }
    for (const auto& [c0, cL] : height_constraints(G)) {
        Rat cc = c0;
        std::vector<Rat> cf(k, Rat(0));
        for (int e = 0; e < G.ne(); ++e) {
            if (cL[e] == 0) continue;
            cc += cL[e] * P.height_expr[e].first;
            for (int j = 0; j < k; ++j) cf[j] += cL[e] * P.height_expr[e].second[j];
        }
        push_row(std::move(cc), std::move(cf));
    }
    return P;
}

// A cell from the joint linear system already lives in free coordinates.
inline Polytope polytope_from_cell(const Cell& cell) {
    Polytope P;
    P.k = cell.dim;
    for (int j = 0; j < cell.dim; ++j) P.names.push_back("x" + std::to_string(j));
    P.rows = cell.ineqs;
    return P;
}

// ------------------------------------------------------------ exact engine

namespace detail {

// scale a row to coprime integer coefficients with positive leading entry
// pattern preserved (canonical form for dedup/caching)
inline void normalize_row(std::pair<Rat, std::vector<Rat>>& row) {
    Int lcm = 1;
    auto upd = [&](const Rat& x) {
        if (x == 0) return;
        Int den = boost::multiprecision::denominator(x);
        lcm = lcm / boost::multiprecision::gcd(lcm, den) * den;
    };
    upd(row.first);
    for (const auto& x : row.second) upd(x);
    Int g = 0;
    auto updg = [&](const Rat& x) {
        if (x == 0) return;
        Int num = boost::multiprecision::numerator(x * Rat(lcm));
        g = boost::multiprecision::gcd(g, boost::multiprecision::abs(num));
    };
    updg(row.first);
    for (const auto& x : row.second) updg(x);
    if (g == 0) return;
    Rat f = Rat(lcm) / Rat(g);
    row.first *= f;
    for (auto& x : row.second) x *= f;
}

inline std::string row_key(const std::pair<Rat, std::vector<Rat>>& row) {
    std::ostringstream os;
    os << row.first;
    for (const auto& x : row.second) os << '|' << x;
    return os.str();
}

// exact solve of the kxk system rows[idx] . x = -c0 by Gaussian elimination
inline bool solve_square(const std::vector<std::pair<Rat, std::vector<Rat>>>& rows,
                         const std::vector<int>& idx, int k, std::vector<Rat>& out) {
    std::vector<std::vector<Rat>> A(k, std::vector<Rat>(k + 1));
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) A[i][j] = rows[idx[i]].second[j];
        A[i][k] = -rows[idx[i]].first;
    }
    for (int c = 0; c < k; ++c) {
        int p = -1;
        for (int r = c; r < k; ++r)
            if (A[r][c] != 0) {
                p = r;
                break;
            }
        if (p < 0) return false;
        std::swap(A[c], A[p]);
        for (int r = 0; r < k; ++r) {
            if (r == c || A[r][c] == 0) continue;
            Rat f = A[r][c] / A[c][c];
            for (int j = c; j <= k; ++j) A[r][j] -= f * A[c][j];
        }
    }
    out.assign(k, Rat(0));
    for (int c = 0; c < k; ++c) out[c] = A[c][k] / A[c][c];
    return true;
}

inline Rat volume_exact_rec(std::vector<std::pair<Rat, std::vector<Rat>>> rows, int k,
                            std::map<std::string, Rat>* cache);

inline Rat volume_exact_impl(std::vector<std::pair<Rat, std::vector<Rat>>>& rows, int k,
                             std::map<std::string, Rat>* cache) {
    // drop trivial/conflicting constant rows; dedupe
    {
        std::vector<std::pair<Rat, std::vector<Rat>>> kept;
        std::set<std::string> seen;
        for (auto& r : rows) {
            bool allz = true;
            for (const auto& x : r.second) allz = allz && x == 0;
            if (allz) {
                if (r.first < 0) return Rat(0);
                continue;
            }
            normalize_row(r);
            if (seen.insert(row_key(r)).second) kept.push_back(std::move(r));
        }
        rows = std::move(kept);
    }
    if (k == 0) return Rat(1);
    if (k == 1) {
        // interval
        bool has_lo = false, has_hi = false;
        Rat lo = 0, hi = 0;
        for (const auto& [c0, cf] : rows) {
            Rat bound = -c0 / cf[0];
            if (cf[0] > 0) {
                if (!has_lo || bound > lo) lo = bound, has_lo = true;
            } else {
                if (!has_hi || bound < hi) hi = bound, has_hi = true;
            }
        }
        if (!has_lo || !has_hi) throw std::logic_error("unbounded 1-d polytope");
        return hi > lo ? hi - lo : Rat(0);
    }
    const int m = static_cast<int>(rows.size());
    // double mirror for fast prefiltering
    std::vector<double> dc0(m);
    std::vector<std::vector<double>> dcf(m, std::vector<double>(k));
    for (int i = 0; i < m; ++i) {
        dc0[i] = to_double(rows[i].first);
        for (int j = 0; j < k; ++j) dcf[i][j] = to_double(rows[i].second[j]);
    }
    const double tol = 1e-7;
    auto feasible_d = [&](const std::vector<double>& x, int skip_upto) {
        for (int i = 0; i < m; ++i) {
            double v = dc0[i];
            for (int j = 0; j < k; ++j) v += dcf[i][j] * x[j];
            if (v < -tol) return false;
        }
        (void)skip_upto;
        return true;
    };
    // vertex enumeration over k-subsets with exact confirmation
    std::vector<std::vector<Rat>> verts;
    std::set<std::string> vseen;
    std::vector<std::vector<int>> incident(m);
    std::vector<int> idx(k);
    std::function<void(int, int)> rec_subset = [&](int start, int depth) {
        if (depth == k) {
            // double prefilter: solve in doubles
            std::vector<std::vector<double>> A(k, std::vector<double>(k + 1));
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < k; ++j) A[i][j] = dcf[idx[i]][j];
                A[i][k] = -dc0[idx[i]];
            }
            bool singular = false;
            for (int c = 0; c < k && !singular; ++c) {
                int p = c;
                for (int r = c + 1; r < k; ++r)
                    if (std::fabs(A[r][c]) > std::fabs(A[p][c])) p = r;
                if (std::fabs(A[p][c]) < 1e-11) {
                    singular = true;
                    break;
                }
                std::swap(A[c], A[p]);
                for (int r = 0; r < k; ++r) {
                    if (r == c) continue;
                    double f = A[r][c] / A[c][c];
                    for (int j = c; j <= k; ++j) A[r][j] -= f * A[c][j];
                }
            }
            bool try_exact = singular;
            if (!singular) {
                std::vector<double> x(k);
                for (int c = 0; c < k; ++c) x[c] = A[c][k] / A[c][c];
                try_exact = feasible_d(x, -1);
            }
            if (try_exact) {
                std::vector<Rat> x;
                if (solve_square(rows, idx, k, x)) {
                    bool ok = true;
                    for (int i = 0; i < m && ok; ++i) {
                        Rat v = rows[i].first;
                        for (int j = 0; j < k; ++j)
                            if (rows[i].second[j] != 0) v += rows[i].second[j] * x[j];
                        if (v < 0) ok = false;
                    }
                    if (ok) {
                        std::ostringstream os;
                        for (const auto& c : x) os << c << '|';
                        if (vseen.insert(os.str()).second) verts.push_back(x);
                    }
                }
            }
            return;
        }
        for (int i = start; i <= m - (k - depth); ++i) {
            idx[depth] = i;
            rec_subset(i + 1, depth + 1);
        }
    };
    rec_subset(0, 0);
    if (verts.empty()) return Rat(0);
    // incidence and full-dimensionality
    for (int i = 0; i < m; ++i) {
        for (int vi = 0; vi < static_cast<int>(verts.size()); ++vi) {
            Rat v = rows[i].first;
            for (int j = 0; j < k; ++j)
                if (rows[i].second[j] != 0) v += rows[i].second[j] * verts[vi][j];
            if (v == 0) incident[i].push_back(vi);
        }
    }
    {
        // rank of (verts - verts[0]) must be k, else volume 0
        std::vector<std::vector<Rat>> M;
        for (size_t vi = 1; vi < verts.size(); ++vi) {
            std::vector<Rat> r(k);
            for (int j = 0; j < k; ++j) r[j] = verts[vi][j] - verts[0][j];
            M.push_back(std::move(r));
        }
        int rank = 0;
        for (int c = 0; c < k; ++c) {
            int p = -1;
            for (int r = rank; r < static_cast<int>(M.size()); ++r)
                if (M[r][c] != 0) {
                    p = r;
                    break;
                }
            if (p < 0) continue;
            std::swap(M[rank], M[p]);
            for (int r = 0; r < static_cast<int>(M.size()); ++r) {
                if (r == rank || M[r][c] == 0) continue;
                Rat f = M[r][c] / M[rank][c];
                for (int j = c; j < k; ++j) M[r][j] -= f * M[rank][j];
            }
            ++rank;
        }
        if (rank < k) return Rat(0);
    }
    Rat total = 0;
    for (int i = 0; i < m; ++i) {
        if (static_cast<int>(incident[i].size()) < k) continue;  // not a facet
        if (rows[i].first == 0) continue;  // facet through the origin: no contribution
        // eliminate the coordinate with the largest coefficient
        int jmax = 0;
        for (int j = 1; j < k; ++j)
            if (boost::multiprecision::abs(rows[i].second[j]) >
                boost::multiprecision::abs(rows[i].second[jmax]))
                jmax = j;
        if (rows[i].second[jmax] == 0) continue;
        Rat aj = rows[i].second[jmax];
        std::vector<std::pair<Rat, std::vector<Rat>>> sub;
        for (int i2 = 0; i2 < m; ++i2) {
            if (i2 == i) continue;
            const auto& [c0, cf] = rows[i2];
            Rat f = cf[jmax] / aj;
            std::pair<Rat, std::vector<Rat>> r{c0 - f * rows[i].first, {}};
            r.second.reserve(k - 1);
            for (int j = 0; j < k; ++j) {
                if (j == jmax) continue;
                r.second.push_back(cf[j] - f * rows[i].second[j]);
            }
            sub.push_back(std::move(r));
        }
        Rat fv = volume_exact_rec(std::move(sub), k - 1, cache);
        total += rows[i].first * fv / boost::multiprecision::abs(aj);
    }
    return total / Rat(k);
}

inline Rat volume_exact_rec(std::vector<std::pair<Rat, std::vector<Rat>>> rows, int k,
                            std::map<std::string, Rat>* cache) {
    std::string key;
    if (cache && k >= 2) {
        std::vector<std::string> keys;
        for (auto r : rows) {
            normalize_row(r);
            keys.push_back(row_key(r));
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        std::ostringstream os;
        os << k;
        for (const auto& s : keys) os << ';' << s;
        key = os.str();
        auto it = cache->find(key);
        if (it != cache->end()) return it->second;
    }
    Rat v = volume_exact_impl(rows, k, cache);
    if (cache && !key.empty()) (*cache)[key] = v;
    return v;
}

}  // namespace detail

inline Rat volume_exact(const Polytope& P, int k_max = 6) {
    if (P.k > k_max) throw DimensionTooLarge("volume_exact: dimension over cap");
    std::map<std::string, Rat> cache;
    return detail::volume_exact_rec(P.rows, P.k, &cache);
}

// ------------------------------------------------------------ Monte Carlo

// Hit-rate estimate of a membership oracle over the unit cube [0,1]^k.
// Deterministic given the seed; batches are reduced in fixed order.
inline VolumeEstimate volume_mc(const std::function<bool(const double*)>& oracle, int k,
                                long long N, std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("volume_mc: N >= 1 required");
    const long long batch = 65536;
    long long hits = 0, done = 0;
    std::vector<double> x(std::max(k, 1));
    for (long long b = 0; done < N; ++b) {
        Rng rng(seed, static_cast<std::uint64_t>(b));
        long long todo = std::min(batch, N - done);
        long long h = 0;
        for (long long i = 0; i < todo; ++i) {
            for (int j = 0; j < k; ++j) x[j] = rng.uniform();
            if (oracle(x.data())) ++h;
        }
        hits += h;
        done += todo;
    }
    double p = static_cast<double>(hits) / static_cast<double>(N);
    VolumeEstimate est;
    est.value = p;
    est.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(N));
    est.method = "mc";
    est.samples = N;
    est.seed = seed;
    return est;
}

// Fast double-precision oracle from a polytope's closure rows.
inline VolumeEstimate volume_mc(const Polytope& P, long long N, std::uint64_t seed) {
    const int k = P.k;
    std::vector<double> c0;
    std::vector<std::vector<double>> cf;
    for (const auto& [c, v] : P.rows) {
        c0.push_back(to_double(c));
        std::vector<double> row(k);
        for (int j = 0; j < k; ++j) row[j] = to_double(v[j]);
        cf.push_back(std::move(row));
    }
    auto oracle = [&](const double* x) {
        for (size_t i = 0; i < c0.size(); ++i) {
            double v = c0[i];
            for (int j = 0; j < k; ++j) v += cf[i][j] * x[j];
            if (v < 0) return false;
        }
        return true;
    };
    return volume_mc(oracle, k, N, seed);
}

// ------------------------------------------------------------- dispatcher

struct VolumeOptions {
    int exact_dim_cap = 6;
    long long mc_samples = 1000000;
    std::uint64_t seed = 1;
    std::vector<int>* cotree = nullptr;  // override cotree choice
};

inline VolumeEstimate exact_estimate(const Rat& v) {
    VolumeEstimate est;
    est.value = to_double(v);
    est.method = "exact";
    est.exact = true;
    est.exact_value = v;
    return est;
}

// Volume of one cell's height polytope over a cotree, for the hive-convention
// boundary triple; dispatches exact vs MC by dimension.
inline VolumeEstimate volume_summand(const StructureGraph& G, const AngleVector& alpha,
                                     const AngleVector& beta, const AngleVector& gamma_hive,
                                     const VolumeOptions& opt = {}) {
    Divergence phi;
    try {
        phi = boundary_divergence(G, alpha, beta, gamma_hive);
    } catch (const NotSolvable&) {
        VolumeEstimate est;
        est.method = "empty";
        est.note = "NotSolvable";
        return est;
    }
    std::vector<int> S;
    if (opt.cotree) {
        S = *opt.cotree;
    } else {
        auto T = find_spanning_tree(G.fg);
        std::vector<bool> in_T(G.ne(), false);
        for (int e : T) in_T[e] = true;
        for (int e = 0; e < G.ne(); ++e)
            if (!in_T[e]) S.push_back(e);
    }
    Polytope P = polytope_from(G, phi, S);
    if (P.k <= opt.exact_dim_cap) return exact_estimate(volume_exact(P, opt.exact_dim_cap));
    VolumeEstimate est = volume_mc(P, opt.mc_samples, opt.seed);
    return est;
}

}  // namespace hv

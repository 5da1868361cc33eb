#pragma once
// Heat kernels on the circle and on conjugacy-class space, the cylinder
// partition function, heat-kernel smoothing of Z_{g,p}, loop-tree marginals
// for disjoint-curve holonomies, and two independent oracles: a character
// series over dominant weights and a Haar-orbit product sampler.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "honeyvol/angles.hpp"
#include "honeyvol/assembler.hpp"
#include "honeyvol/rng.hpp"

namespace hv {

struct NonpositiveTime : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TruncationInsufficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidTree : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------ circle kernel

// Transition density of Brownian motion on the circle, period 2*pi,
// normalized so that the integral over one period is 1.  Wrapped-Gaussian
// summation below T = 1, Fourier series above; both tails < 1e-14 there.
inline double circle_heat_kernel(double T, double x, double y) {
    if (T <= 0) throw NonpositiveTime("circle_heat_kernel: T <= 0");
    const double pi = std::acos(-1.0);
    double th = std::remainder(x - y, 2 * pi);
    if (T < 1.0) {
        double s = 0.0;
        int M = static_cast<int>(std::ceil(std::sqrt(80.0 * T) / (2 * pi))) + 2;
        for (int m = -M; m <= M; ++m) {
            double a = th + 2 * pi * m;
            s += std::exp(-a * a / (2 * T));
        }
        return s / std::sqrt(2 * pi * T);
    }
    double s = 1.0;
    for (int k = 1;; ++k) {
        double w = std::exp(-0.5 * k * k * T);
        if (w < 1e-18) break;
        s += 2.0 * w * std::cos(k * th);
    }
    return s / (2 * pi);
}

// ------------------------------------------------------- character series

struct WeightEntry {
    std::vector<int> lambda;  // weakly decreasing
    double dim;
    double casimir;
};

namespace ydetail {
inline double weight_dimension(const std::vector<int>& l) {
    int n = static_cast<int>(l.size());
    double num = 1.0, den = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            num *= l[i] - l[j] + j - i;
            den *= j - i;
        }
    return num / den;
}
inline double weight_casimir(const std::vector<int>& l) {
    int n = static_cast<int>(l.size());
    double c = 0.0;
    for (int k = 0; k < n; ++k)  // sum of l_k (l_k + n + 1 - 2(k+1))
        c += static_cast<double>(l[k]) * (l[k] + n - 1 - 2 * k);
    return c;
}
// Weyl character at a regular class (moduli coordinates, angles = 2 pi a_j):
//   det(e^{2 pi i a_j l_k}) / det(e^{2 pi i a_j (n - k)}),  l_k = lambda_k + n - k.
inline std::complex<double> weyl_character(const std::vector<int>& l, const AngleVector& a) {
    const double pi = std::acos(-1.0);
    int n = static_cast<int>(l.size());
    Eigen::MatrixXcd Num(n, n), Den(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double lk = l[k] + n - 1 - k;
            Num(j, k) = std::polar(1.0, 2 * pi * a.vals()[j] * lk);
            Den(j, k) = std::polar(1.0, 2 * pi * a.vals()[j] * (n - 1 - k));
        }
    return Num.determinant() / Den.determinant();
}
// all weakly decreasing integer n-tuples with max |entry| == shell
inline void shell_weights(int n, int shell, std::vector<std::vector<int>>* out) {
    std::vector<int> l(n);
    std::function<void(int, int, bool)> rec = [&](int i, int hi, bool hit) {
        if (i == n) {
            if (hit) out->push_back(l);
            return;
        }
        for (int v = -shell; v <= hi; ++v) {
            l[i] = v;
            rec(i + 1, v, hit || std::abs(v) == shell);
        }
    };
    rec(0, shell, shell == 0);
}
}  // namespace ydetail

// ------------------------------------------------------------- Dyson kernel

// Raw determinantal expression (Delta(y)/Delta(x)) det[p_T(2 pi x_i, 2 pi y_j)].
inline double dyson_kernel_determinant(double T, const AngleVector& x,
                                       const AngleVector& y) {
    if (T <= 0) throw NonpositiveTime("dyson_kernel: T <= 0");
    if (!x.regular() || !y.regular()) throw NotRegular("dyson_kernel: class not regular");
    const double pi = std::acos(-1.0);
    const int n = x.n();
    if (y.n() != n) throw std::invalid_argument("dyson_kernel: size mismatch");
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            M(i, j) = circle_heat_kernel(T, 2 * pi * x.vals()[i], 2 * pi * y.vals()[j]);
    return vandermonde(y) / vandermonde(x) * M.determinant();
}

// Transition density of the projected eigenvalue process on moduli classes,
// normalized so that the integral over the sorted class space is 1.  For an
// odd number of eigenvalues the circular Karlin-McGregor determinant is
// exactly proportional to the density; the correction is the Vandermonde
// eigenfunction energy n(n^2-1)/24 and the radians-to-moduli Jacobian.  For
// even n the determinant picks up winding signs, so the character series is
// used instead (equal to the determinant route where both are valid).
inline double dyson_kernel(double T, const AngleVector& x, const AngleVector& y) {
    if (T <= 0) throw NonpositiveTime("dyson_kernel: T <= 0");
    if (!x.regular() || !y.regular()) throw NotRegular("dyson_kernel: class not regular");
    const double pi = std::acos(-1.0);
    const int n = x.n();
    if (y.n() != n) throw std::invalid_argument("dyson_kernel: size mismatch");
    if (n % 2 == 1) {
        double energy = n * (static_cast<double>(n) * n - 1) / 24.0;
        return std::pow(2 * pi, n) * std::exp(energy * T) *
               dyson_kernel_determinant(T, x, y);
    }
    std::complex<double> s = 0.0;
    for (int r = 0;; ++r) {
        std::vector<std::vector<int>> ws;
        ydetail::shell_weights(n, r, &ws);
        std::complex<double> shell = 0.0;
        for (const auto& l : ws)
            shell += ydetail::weyl_character(l, x) *
                     std::conj(ydetail::weyl_character(l, y)) *
                     std::exp(-0.5 * T * ydetail::weight_casimir(l));
        s += shell;
        if (r > 2 && std::abs(shell) < 1e-13 * std::max(std::abs(s), 1e-300)) break;
        if (r > 200) throw TruncationInsufficient("dyson_kernel series");
    }
    double d = vandermonde(y);
    return s.real() * d * d;
}

inline double cylinder_z(double T, const AngleVector& a1, const AngleVector& a2) {
    double d = vandermonde(a2);
    return dyson_kernel(T, a1, a2) / (d * d);
}

// Partition function of the heat-kernel lattice gauge theory on a genus-g
// surface with p boundary classes:
//   sum over dominant weights of d^(2-2g-p) e^(-T c2 / 2) prod chi(alpha_i),
// truncated by shells of max |lambda_i|.
inline double lattice_oracle(int n, int g, int p, double T,
                             const std::vector<AngleVector>& alphas, int radius = 48) {
    if (T <= 0) throw NonpositiveTime("lattice_oracle: T <= 0");
    if (static_cast<int>(alphas.size()) != p)
        throw std::invalid_argument("lattice_oracle: boundary count");
    std::complex<double> total = 0.0;
    double last_rel = 1.0;
    for (int r = 0; r <= radius; ++r) {
        std::vector<std::vector<int>> ws;
        ydetail::shell_weights(n, r, &ws);
        std::complex<double> shell = 0.0;
        for (const auto& l : ws) {
            double d = ydetail::weight_dimension(l);
            double c2 = ydetail::weight_casimir(l);
            std::complex<double> term = std::pow(d, 2 - 2 * g - p) * std::exp(-0.5 * T * c2);
            for (const auto& a : alphas) term *= ydetail::weyl_character(l, a);
            shell += term;
        }
        total += shell;
        last_rel = std::abs(shell) / std::max(std::abs(total), 1e-300);
        if (r > 1 && last_rel < 1e-6) return total.real();
    }
    throw TruncationInsufficient("lattice_oracle: tail above 1e-6 at max shell");
}

// ------------------------------------------------------ orbit product oracle

// Haar unitary by QR of a complex Ginibre matrix with the R-diagonal phase
// fix (gives exact Haar measure).
inline Eigen::MatrixXcd haar_unitary(int n, Rng& rng) {
    Eigen::MatrixXcd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            G(i, j) = std::complex<double>(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
    Eigen::MatrixXcd Q = qr.householderQ();
    Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        std::complex<double> d = R(j, j);
        Q.col(j) *= d / std::abs(d);
    }
    return Q;
}

// Spectral classes of (UV)^{-1} where U, V are Haar-random conjugates of the
// fixed classes alpha and beta; each sample is a standardized moduli vector.
inline std::vector<std::vector<double>> orbit_product_sampler(const AngleVector& alpha,
                                                              const AngleVector& beta,
                                                              long long N,
                                                              std::uint64_t seed) {
    const double pi = std::acos(-1.0);
    const int n = alpha.n();
    Eigen::MatrixXcd Da = Eigen::MatrixXcd::Zero(n, n), Db = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        Da(i, i) = std::polar(1.0, 2 * pi * alpha.vals()[i]);
        Db(i, i) = std::polar(1.0, 2 * pi * beta.vals()[i]);
    }
    Rng rng(seed, 101);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<size_t>(N));
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es;
    for (long long it = 0; it < N; ++it) {
        Eigen::MatrixXcd W = haar_unitary(n, rng), X = haar_unitary(n, rng);
        Eigen::MatrixXcd M = (W * Da * W.adjoint()) * (X * Db * X.adjoint());
        es.compute(M, false);
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i)
            g[i] = frac01(-std::arg(es.eigenvalues()[i]) / (2 * pi));
        std::sort(g.begin(), g.end(), std::greater<double>());
        out.push_back(std::move(g));
    }
    return out;
}

// ------------------------------------------------------ heat-kernel smoothing

struct YmEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    long long samples = 0;
};

struct YmOptions {
    long long samples = 20000;
    std::uint64_t seed = 1;
    ZOptions z;  // inner flat-volume evaluation options
};

// MC estimate of  integral Z_{g,p}(u_1..u_p) prod_i k_{T/p}(1-u_i, alpha_i) du
// over the product of class spaces; the last u is drawn on the sum-residue
// slice where Z is supported, the entrywise complement is standardized.
inline YmEstimate ym_smoothed(const SurfaceSpec& spec, int n, double T,
                              const std::vector<AngleVector>& alphas,
                              const YmOptions& opt = {}) {
    if (T <= 0) throw NonpositiveTime("ym_smoothed: T <= 0");
    validate_surface(spec);
    const int p = spec.p;
    if (static_cast<int>(alphas.size()) != p)
        throw std::invalid_argument("ym_smoothed: boundary count");
    const double Tk = T / p;
    const bool fast = (spec.g == 0 && spec.p == 3);
    double calib = calibration_for(n, opt.z.calibration_file);
    std::unique_ptr<Z03Fast> z03f;
    if (fast) z03f = std::make_unique<Z03Fast>(n, calib);
    Rng rng(opt.seed, 31);
    const double pi = std::acos(-1.0);
    // permutations for the sorted-proposal density
    std::vector<std::vector<int>> perms;
    {
        std::vector<int> idx(n);
        for (int j = 0; j < n; ++j) idx[j] = j;
        do perms.push_back(idx);
        while (std::next_permutation(idx.begin(), idx.end()));
    }
    // wrapped-Gaussian proposal density (moduli coordinate)
    auto rho = [&](double v, double m) {
        return 2 * pi * circle_heat_kernel(Tk, 2 * pi * v, 2 * pi * m);
    };
    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(opt.samples));
    for (long long it = 0; it < opt.samples; ++it) {
        // free classes u_1..u_{p-1} importance-sampled near the kernel peak
        // (complement class of alpha_i), slice class u_p fixing the total sum
        std::vector<std::vector<double>> u(p);
        double w = 1.0;
        double ssum = 0.0;
        bool ok = true;
        for (int i = 0; i + 1 < p && ok; ++i) {
            // the kernel is peaked at the start class itself; propose there
            const std::vector<double>& means = alphas[i].vals();
            std::vector<double> v(n);
            for (int j = 0; j < n; ++j)
                v[j] = frac01(means[j] + std::sqrt(Tk) / (2 * pi) * rng.normal());
            std::sort(v.begin(), v.end(), std::greater<double>());
            double q = 0.0;
            for (const auto& s : perms) {
                double t = 1.0;
                for (int j = 0; j < n; ++j) t *= rho(v[j], means[s[j]]);
                q += t;
            }
            auto vv = AngleVector::from_doubles(v);
            if (!vv.regular() || q <= 0.0) {
                ok = false;
                break;
            }
            w *= dyson_kernel(Tk, alphas[i], vv) / q;
            u[i].resize(n);
            for (int j = 0; j < n; ++j) {
                u[i][j] = frac01(1.0 - v[n - 1 - j]);
                ssum += u[i][j];
            }
        }
        if (ok) {
            double residue = frac01(-(ssum + n * (spec.g - 1.0)));
            u[p - 1].resize(n);
            double s = 0.0;
            for (int j = 0; j + 1 < n; ++j) {
                u[p - 1][j] = rng.uniform();
                s += u[p - 1][j];
            }
            u[p - 1][n - 1] = frac01(residue - s);
            std::sort(u[p - 1].begin(), u[p - 1].end(), std::greater<double>());
            std::vector<double> comp(n);
            for (int j = 0; j < n; ++j) comp[j] = 1.0 - u[p - 1][n - 1 - j];
            auto uc = AngleVector::from_doubles(comp);
            if (!uc.regular()) {
                ok = false;
            } else {
                // sorted-uniform slice sampling has density n!
                w *= dyson_kernel(Tk, alphas[p - 1], uc) / factorial_d(n);
            }
        }
        if (!ok) {
            vals.push_back(0.0);
            continue;
        }
        double zv = 0.0;
        if (fast) {
            zv = z03f->value(u[0], u[1], u[2]);
        } else {
            // exactify the sampled classes so the flat evaluator can run
            std::vector<AngleVector> ue;
            bool exok = true;
            Rat running = Rat(n) * Rat(spec.g - 1);
            for (int i = 0; i < p; ++i) {
                Rat target;
                if (i + 1 < p) {
                    Rat s = 0;
                    for (double x : u[i]) s += adetail::rat_approx(x);
                    target = s;
                } else {
                    double tot = 0;
                    for (double x : u[i]) tot += x;
                    target = Rat(std::llround(tot + to_double(running))) - running;
                }
                std::vector<Rat> ex;
                if (!adetail::exactify_with_sum(u[i], target, &ex)) {
                    exok = false;
                    break;
                }
                running += target;
                ue.push_back(AngleVector::from_rats(ex));
            }
            if (exok) {
                try {
                    zv = z_gp(spec, n, ue, opt.z).value;
                } catch (const NotSolvable&) {
                    zv = 0.0;
                } catch (const NotRegular&) {
                    zv = 0.0;
                }
            }
        }
        vals.push_back(zv * w);
    }
    double mean = 0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(vals.size()) * std::max<double>(1, vals.size() - 1);
    return YmEstimate{mean, std::sqrt(var), opt.samples};
}

// ----------------------------------------------------------- loop trees

struct LoopVertex {
    int id = 0;
    double area = 0.0;
    int genus = 0;
};
struct LoopEdge {
    int from = 0, to = 0;
    AngleVector alpha;  // label in the from -> to direction; reverse is 1 - alpha
};
struct LoopTree {
    std::vector<LoopVertex> vertices;
    std::vector<LoopEdge> edges;
};

inline void validate_tree(const LoopTree& t, int n) {
    if (t.vertices.empty()) throw InvalidTree("empty tree");
    std::map<int, int> idx;
    for (size_t i = 0; i < t.vertices.size(); ++i) {
        if (!idx.emplace(t.vertices[i].id, static_cast<int>(i)).second)
            throw InvalidTree("duplicate vertex id");
        if (t.vertices[i].area < 0 || t.vertices[i].genus < 0)
            throw InvalidTree("negative label");
    }
    std::vector<int> parent(t.vertices.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (const auto& e : t.edges) {
        if (!idx.count(e.from) || !idx.count(e.to)) throw InvalidTree("edge endpoint");
        if (e.alpha.n() != n) throw InvalidTree("edge label size");
        if (!e.alpha.regular()) throw NotRegular("edge label not regular");
        parent[find(idx[e.from])] = find(idx[e.to]);
    }
    int root = find(0);
    for (size_t i = 0; i < parent.size(); ++i)
        if (find(static_cast<int>(i)) != root) throw InvalidTree("tree not connected");
}

namespace ydetail {
inline AngleVector complement_label(const AngleVector& a) {
    std::vector<double> v;
    for (int j = a.n() - 1; j >= 0; --j) v.push_back(frac01(1.0 - a.vals()[j]));
    return AngleVector::from_doubles(v);
}
// heat-kernel density started at the identity class, via the weight series:
// sum over dominant weights of d e^(-A c2 / 2) chi(alpha), real part.
inline double identity_heat_density(int n, double A, const AngleVector& a,
                                    int radius = 48) {
    std::complex<double> total = 0.0;
    for (int r = 0; r <= radius; ++r) {
        std::vector<std::vector<int>> ws;
        shell_weights(n, r, &ws);
        std::complex<double> shell = 0.0;
        for (const auto& l : ws) {
            double d = weight_dimension(l);
            shell += d * std::exp(-0.5 * A * weight_casimir(l)) * weyl_character(l, a);
        }
        total += shell;
        if (r > 1 && std::abs(shell) < 1e-6 * std::max(std::abs(total), 1e-300)) {
            double dv = vandermonde(a);
            return total.real() * dv * dv;
        }
    }
    throw TruncationInsufficient("identity_heat_density: tail above 1e-6");
}
}  // namespace ydetail

// Product formula over the loop-separated components: each vertex contributes
// its heat-smoothed flat partition function at the incident edge labels;
// degree-1 genus-0 vertices collapse to the identity-started kernel density;
// zero-area vertices skip the smoothing and evaluate the flat value directly.
inline YmEstimate ym_marginal(const LoopTree& tree, int n, const YmOptions& opt = {}) {
    validate_tree(tree, n);
    YmEstimate total{1.0, 0.0, 0};
    double rel2 = 0.0;
    for (const auto& v : tree.vertices) {
        std::vector<AngleVector> labels;
        for (const auto& e : tree.edges) {
            if (e.from == v.id) labels.push_back(e.alpha);
            if (e.to == v.id) labels.push_back(ydetail::complement_label(e.alpha));
        }
        int d = static_cast<int>(labels.size());
        double f = 1.0, fe = 0.0;
        if (v.genus == 0 && d == 1) {
            f = v.area > 0 ? ydetail::identity_heat_density(n, v.area, labels[0])
                           : throw InvalidTree("zero-area disc vertex");
        } else if (v.genus == 0 && d == 2) {
            if (v.area <= 0) throw InvalidTree("zero-area cylinder vertex");
            f = dyson_kernel(v.area, labels[0], labels[1]) /
                std::pow(vandermonde(labels[1]), 2);
        } else {
            SurfaceSpec spec = pants_surface(v.genus, d);
            if (v.area > 0) {
                auto est = ym_smoothed(spec, n, v.area, labels, opt);
                f = est.value;
                fe = est.stderr_;
            } else {
                std::vector<AngleVector> exact;
                for (const auto& a : labels) {
                    std::vector<Rat> r;
                    for (double x : a.vals()) r.push_back(adetail::rat_approx(x, 1LL << 40));
                    exact.push_back(AngleVector::from_rats(r));
                }
                auto zr = z_gp(spec, n, exact, opt.z);
                f = zr.value;
                fe = zr.stderr_;
            }
        }
        total.value *= f;
        if (f != 0.0) rel2 += (fe / f) * (fe / f);
        total.samples += opt.samples;
    }
    total.stderr_ = std::fabs(total.value) * std::sqrt(rel2);
    return total;
}

}  // namespace hv

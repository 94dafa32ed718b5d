#include "courtfda/fda.hpp"

#include "courtfda/error.hpp"
#include "courtfda/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace courtfda::fda {

namespace {

void check_weights(const GridSpec& grid, const QuadratureWeights& w) {
    if (w.wx.size() != grid.nx || w.wy.size() != grid.ny) {
        throw FdaError("quadrature weights do not match the grid");
    }
}

void check_view(const FieldView& f) {
    if (f.missed.size() != f.grid.node_count() || f.made.size() != f.grid.node_count()) {
        throw FdaError("field size does not match its grid");
    }
}

double weighted_dot(std::span<const double> a, std::span<const double> b, const GridSpec& grid,
                    const QuadratureWeights& w) {
    double total = 0.0;
    for (std::size_t j = 0; j < grid.ny; ++j) {
        const std::size_t base = j * grid.nx;
        double row = 0.0;
        for (std::size_t i = 0; i < grid.nx; ++i) row += w.wx[i] * a[base + i] * b[base + i];
        total += w.wy[j] * row;
    }
    return total;
}

GridSpec common_grid(std::span<const FieldView> samples) {
    if (samples.empty()) throw FdaError("no samples");
    const GridSpec grid = samples.front().grid;
    for (const auto& s : samples) {
        if (s.grid != grid) throw FdaError("samples do not share one grid");
        check_view(s);
    }
    return grid;
}

BivariateField centered(const FieldView& x, const BivariateField& mean) {
    BivariateField c{x.grid, std::vector<double>(x.missed.size()), std::vector<double>(x.made.size())};
    for (std::size_t n = 0; n < c.missed.size(); ++n) c.missed[n] = x.missed[n] - mean.missed[n];
    for (std::size_t n = 0; n < c.made.size(); ++n) c.made[n] = x.made[n] - mean.made[n];
    return c;
}

// Largest |value| wins; strict comparison keeps the lowest index, and the made
// component is only scanned after the missed one.
bool needs_flip(const BivariateField& phi) {
    double best = -1.0;
    double value = 0.0;
    for (const auto* comp : {&phi.missed, &phi.made}) {
        for (double v : *comp) {
            if (std::abs(v) > best) {
                best = std::abs(v);
                value = v;
            }
        }
    }
    return value < 0.0;
}

}  // namespace

double inner_product(const FieldView& f, const FieldView& g, const QuadratureWeights& w) {
    if (f.grid != g.grid) throw FdaError("inner product of fields on different grids");
    check_view(f);
    check_view(g);
    check_weights(f.grid, w);
    return weighted_dot(f.missed, g.missed, f.grid, w) + weighted_dot(f.made, g.made, f.grid, w);
}

double h_norm(const FieldView& f, const QuadratureWeights& w) {
    return std::sqrt(inner_product(f, f, w));
}

double h_distance(const FieldView& f, const FieldView& g, const QuadratureWeights& w) {
    if (f.grid != g.grid) throw FdaError("distance between fields on different grids");
    BivariateField diff = BivariateField::zeros(f.grid);
    for (std::size_t n = 0; n < diff.missed.size(); ++n) diff.missed[n] = f.missed[n] - g.missed[n];
    for (std::size_t n = 0; n < diff.made.size(); ++n) diff.made[n] = f.made[n] - g.made[n];
    return h_norm(diff.view(), w);
}

BivariateField mean_function(std::span<const FieldView> samples) {
    const GridSpec grid = common_grid(samples);
    auto mean = BivariateField::zeros(grid);
    for (const auto& s : samples) {
        for (std::size_t n = 0; n < mean.missed.size(); ++n) mean.missed[n] += s.missed[n];
        for (std::size_t n = 0; n < mean.made.size(); ++n) mean.made[n] += s.made[n];
    }
    const double inv = 1.0 / static_cast<double>(samples.size());
    for (auto& v : mean.missed) v *= inv;
    for (auto& v : mean.made) v *= inv;
    return mean;
}

Matrix gram_matrix(std::span<const FieldView> samples, const BivariateField& mean,
                   const QuadratureWeights& w, std::size_t threads) {
    const GridSpec grid = common_grid(samples);
    if (mean.grid != grid) throw FdaError("mean function is on a different grid");
    check_weights(grid, w);

    const std::size_t n = samples.size();
    std::vector<BivariateField> c(n);
    parallel_for(n, threads, [&](std::size_t i) { c[i] = centered(samples[i], mean); });

    Matrix g(n, n);
    parallel_for(n, threads, [&](std::size_t i) {
        for (std::size_t j = i; j < n; ++j) g(i, j) = inner_product(c[i].view(), c[j].view(), w);
    });
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
    }
    return g;
}

SpectralDecomposition eigendecompose(const Matrix& g) {
    const std::size_t n = g.rows();
    if (g.cols() != n) throw FdaError("eigendecompose needs a square matrix");

    double max_abs = 0.0;
    for (double v : g.data()) max_abs = std::max(max_abs, std::abs(v));
    const double sym_tol = 1e-12 * std::max(1.0, max_abs);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(g(i, j) - g(j, i)) > sym_tol) {
                throw FdaError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                               std::to_string(j) + ")");
            }
        }
    }

    // Work on the symmetrized copy.
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (g(i, j) + g(j, i));
    }
    Matrix v = Matrix::identity(n);

    double frob = 0.0;
    for (double x : a.data()) frob += x * x;
    frob = std::sqrt(frob);
    const double negligible = 1e-18 * frob;

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                if (std::abs(apq) <= negligible) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                rotated = true;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = 0.0;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = (theta >= 0.0 ? 1.0 : -1.0) /
                        (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
                    a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = vrp - s * (vrq + tau * vrp);
                    v(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    SpectralDecomposition out{std::vector<double>(n), Matrix(n, n)};
    const double top = n > 0 ? std::abs(a(order.front(), order.front())) : 0.0;
    const double clamp = 1e-10 * std::max(1.0, top);
    for (std::size_t k = 0; k < n; ++k) {
        double value = a(order[k], order[k]);
        if (value < 0.0 && value >= -clamp) value = 0.0;
        out.values[k] = value;
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

std::vector<double> MfpcaModel::eigenvalues() const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.eigenvalue);
    return out;
}

MfpcaModel fit_mfpca(std::span<const FieldView> samples, ComponentSelection selection,
                     std::size_t threads) {
    if (samples.size() < 2) throw FdaError("MFPCA needs at least 2 samples");
    const GridSpec grid = common_grid(samples);
    const std::size_t n = samples.size();

    MfpcaModel model;
    model.grid = grid;
    model.weights = QuadratureWeights::trapezoid(grid);
    model.mean = mean_function(samples);
    model.n_samples = n;

    const Matrix g = gram_matrix(samples, model.mean, model.weights, threads);
    SpectralDecomposition eig = eigendecompose(g);

    const double lead = std::max(0.0, eig.values.front());
    std::size_t rank = 0;
    while (rank < n && lead > 0.0 && eig.values[rank] > 1e-12 * lead) ++rank;
    model.numerical_rank = rank;

    const double denom = static_cast<double>(n - 1);
    double spectrum = 0.0;
    for (double l : eig.values) spectrum += std::max(0.0, l);
    model.total_variance = spectrum / denom;

    std::size_t k_keep = 0;
    if (const auto* count = std::get_if<ComponentCount>(&selection)) {
        if (count->count == 0) throw FdaError("component count must be at least 1");
        if (count->count > n - 1) {
            throw FdaError("requested " + std::to_string(count->count) +
                           " components but at most N-1 = " + std::to_string(n - 1) +
                           " are available");
        }
        if (count->count > rank) {
            throw FdaError("requested " + std::to_string(count->count) +
                           " components but the achievable numerical rank is " +
                           std::to_string(rank));
        }
        k_keep = count->count;
    } else {
        const double fraction = std::get<VarianceThreshold>(selection).fraction;
        if (!(fraction > 0.0) || fraction > 1.0) {
            throw FdaError("variance threshold must lie in (0, 1]");
        }
        if (rank == 0) throw FdaError("data has numerical rank 0; no component can be retained");
        double cumulative = 0.0;
        k_keep = rank;
        for (std::size_t k = 0; k < rank; ++k) {
            cumulative += eig.values[k] / spectrum;
            if (cumulative >= fraction) {
                k_keep = k + 1;
                break;
            }
        }
    }

    std::vector<BivariateField> c(n);
    parallel_for(n, threads, [&](std::size_t i) { c[i] = centered(samples[i], model.mean); });

    model.pairs.resize(k_keep);
    model.variance_ratios.resize(k_keep);
    model.training_scores = ScoreMatrix(n, k_keep);
    parallel_for(k_keep, threads, [&](std::size_t k) {
        const double ell = eig.values[k];
        auto phi = BivariateField::zeros(grid);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = eig.vectors(i, k);
            for (std::size_t m = 0; m < phi.missed.size(); ++m) phi.missed[m] += u * c[i].missed[m];
            for (std::size_t m = 0; m < phi.made.size(); ++m) phi.made[m] += u * c[i].made[m];
        }
        const double inv = 1.0 / std::sqrt(ell);
        for (auto& x : phi.missed) x *= inv;
        for (auto& x : phi.made) x *= inv;

        const double sign = needs_flip(phi) ? -1.0 : 1.0;
        if (sign < 0.0) {
            for (auto& x : phi.missed) x = -x;
            for (auto& x : phi.made) x = -x;
        }
        for (std::size_t i = 0; i < n; ++i) {
            model.training_scores(i, k) = sign * std::sqrt(ell) * eig.vectors(i, k);
        }
        model.pairs[k] = EigenPair{ell / denom, std::move(phi)};
        model.variance_ratios[k] = model.total_variance > 0.0 ? (ell / denom) / model.total_variance : 0.0;
    });
    return model;
}

std::vector<double> project_scores(const FieldView& sample, const MfpcaModel& model) {
    if (sample.grid != model.grid) throw FdaError("sample grid does not match the model grid");
    check_view(sample);
    const auto c = centered(sample, model.mean);
    std::vector<double> scores(model.components());
    for (std::size_t k = 0; k < scores.size(); ++k) {
        scores[k] = inner_product(c.view(), model.pairs[k].eigenfunction.view(), model.weights);
    }
    return scores;
}

ScoreMatrix project_all(std::span<const FieldView> samples, const MfpcaModel& model) {
    ScoreMatrix out(samples.size(), model.components());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto s = project_scores(samples[i], model);
        std::copy(s.begin(), s.end(), out.row(i).begin());
    }
    return out;
}

BivariateField reconstruct(std::span<const double> scores, const MfpcaModel& model) {
    if (scores.size() > model.components()) {
        throw FdaError("got " + std::to_string(scores.size()) + " scores but the model has " +
                       std::to_string(model.components()) + " components");
    }
    BivariateField out = model.mean;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        const auto& phi = model.pairs[k].eigenfunction;
        for (std::size_t m = 0; m < out.missed.size(); ++m) out.missed[m] += scores[k] * phi.missed[m];
        for (std::size_t m = 0; m < out.made.size(); ++m) out.made[m] += scores[k] * phi.made[m];
    }
    return out;
}

}  // namespace courtfda::fda

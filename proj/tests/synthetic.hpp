#pragma once

// Test-only data generators. Everything is driven by std::mt19937_64, whose
// output is fixed by the standard, plus a local Box-Muller, so the datasets are
// the same on every platform.

#include "courtfda/density.hpp"
#include "courtfda/grid.hpp"
#include "courtfda/ingest.hpp"
#include "oracle/covariance_oracle.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace synth {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + index(hi - lo + 1); }

    double normal() {
        if (spare_) {
            spare_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * std::numbers::pi * u2);
        spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 eng_;
    bool spare_ = false;
    double cached_ = 0.0;
};

inline std::vector<courtfda::ingest::Point> random_points(Rng& rng, std::size_t n) {
    std::vector<courtfda::ingest::Point> pts(n);
    for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
    return pts;
}

/// Clustered points clipped to the unit square, closer to real shot charts.
inline std::vector<courtfda::ingest::Point> clustered_points(Rng& rng, std::size_t n) {
    const double cx = rng.uniform(0.2, 0.8);
    const double cy = rng.uniform(0.1, 0.6);
    const double s = rng.uniform(0.05, 0.25);
    std::vector<courtfda::ingest::Point> pts;
    while (pts.size() < n) {
        const double x = cx + s * rng.normal();
        const double y = cy + s * rng.normal();
        if (x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0) pts.push_back({x, y});
    }
    return pts;
}

inline courtfda::BivariateField random_field(Rng& rng, const courtfda::GridSpec& grid) {
    auto f = courtfda::BivariateField::zeros(grid);
    for (auto& v : f.missed) v = rng.normal();
    for (auto& v : f.made) v = rng.normal();
    return f;
}

/// Smooth separable mode: cos(a pi x) cos(b pi y) on the chosen component,
/// a linear mix of both components when `component` is 2.
inline courtfda::BivariateField cosine_mode(const courtfda::GridSpec& grid, int a, int b, int component) {
    auto f = courtfda::BivariateField::zeros(grid);
    for (std::size_t j = 0; j < grid.ny; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            const double v = std::cos(a * std::numbers::pi * grid.x(i)) * std::cos(b * std::numbers::pi * grid.y(j));
            const std::size_t k = grid.index(i, j);
            if (component == 0 || component == 2) f.missed[k] = v;
            if (component == 1 || component == 2) f.made[k] = component == 2 ? -0.5 * v : v;
        }
    }
    return f;
}

inline void axpy(double a, const courtfda::BivariateField& x, courtfda::BivariateField& y) {
    for (std::size_t k = 0; k < y.missed.size(); ++k) {
        y.missed[k] += a * x.missed[k];
        y.made[k] += a * x.made[k];
    }
}

/// Gram-Schmidt in H (oracle inner product), twice for stability.
inline std::vector<courtfda::BivariateField> orthonormalize(std::vector<courtfda::BivariateField> fs) {
    for (std::size_t k = 0; k < fs.size(); ++k) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < k; ++j) axpy(-oracle::h_inner(fs[k].view(), fs[j].view()), fs[j], fs[k]);
        }
        const double norm = std::sqrt(oracle::h_inner(fs[k].view(), fs[k].view()));
        for (auto& v : fs[k].missed) v /= norm;
        for (auto& v : fs[k].made) v /= norm;
    }
    return fs;
}

/// Orthonormal smooth bivariate factors: the first is mostly in the missed
/// component, the second mostly in made, the rest mixed.
inline std::vector<courtfda::BivariateField> planted_factors(const courtfda::GridSpec& grid, std::size_t count) {
    std::vector<courtfda::BivariateField> raw;
    const int modes[][3] = {{1, 0, 0}, {0, 1, 1}, {1, 1, 2}, {2, 1, 0}, {1, 2, 1}};
    for (std::size_t k = 0; k < count; ++k) raw.push_back(cosine_mode(grid, modes[k][0], modes[k][1], modes[k][2]));
    return orthonormalize(std::move(raw));
}

struct FactorDataset {
    courtfda::GridSpec grid;
    std::vector<courtfda::BivariateField> factors;  // H-orthonormal
    std::vector<courtfda::BivariateField> samples;

    std::vector<courtfda::FieldView> views() const {
        std::vector<courtfda::FieldView> v;
        for (const auto& s : samples) v.push_back(s.view());
        return v;
    }
};

/// X_i = base + sum_k sqrt(share_k) z_ik psi_k + e_i with z standard normal
/// and e_i white noise of per-node variance noise_share / 2, so that the
/// expected squared H-norm of e_i is noise_share.
inline FactorDataset factor_dataset(std::uint64_t seed, std::size_t n, const courtfda::GridSpec& grid,
                                    const std::vector<double>& shares, double noise_share) {
    Rng rng(seed);
    FactorDataset ds{grid, planted_factors(grid, shares.size()), {}};
    auto base = cosine_mode(grid, 0, 0, 2);
    const double noise_sd = std::sqrt(noise_share / 2.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto x = base;
        for (std::size_t k = 0; k < shares.size(); ++k) axpy(std::sqrt(shares[k]) * rng.normal(), ds.factors[k], x);
        if (noise_share > 0.0) {
            for (auto& v : x.missed) v += noise_sd * rng.normal();
            for (auto& v : x.made) v += noise_sd * rng.normal();
        }
        ds.samples.push_back(std::move(x));
    }
    return ds;
}

/// Density samples from random clustered point sets; realistic pipeline input.
inline std::vector<courtfda::density::FunctionalSample> density_samples(std::uint64_t seed, std::size_t n,
                                                                        const courtfda::GridSpec& grid) {
    Rng rng(seed);
    std::vector<courtfda::density::FunctionalSample> out;
    for (std::size_t i = 0; i < n; ++i) {
        courtfda::ingest::PlayerRecord r;
        r.player_id = "p" + std::to_string(i);
        r.missed_points = clustered_points(rng, rng.between(30, 120));
        r.made_points = clustered_points(rng, rng.between(30, 120));
        out.push_back(courtfda::density::build_sample(r, grid));
    }
    return out;
}

inline std::vector<std::size_t> random_labels(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> labels(n);
    for (auto& l : labels) l = rng.index(k);
    return labels;
}

}  // namespace synth

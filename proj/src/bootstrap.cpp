#include "courtfda/bootstrap.hpp"

#include "courtfda/error.hpp"
#include "courtfda/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace courtfda::bootstrap {

namespace {

void flip(fda::MfpcaModel& model, std::size_t k) {
    auto& phi = model.pairs[k].eigenfunction;
    for (auto& v : phi.missed) v = -v;
    for (auto& v : phi.made) v = -v;
    for (std::size_t i = 0; i < model.training_scores.rows(); ++i) {
        model.training_scores(i, k) = -model.training_scores(i, k);
    }
}

// Aligns the components both models have.
void align_prefix(const fda::MfpcaModel& reference, fda::MfpcaModel& candidate) {
    const std::size_t k_common = std::min(reference.components(), candidate.components());
    for (std::size_t k = 0; k < k_common; ++k) {
        const double ip = fda::inner_product(candidate.pairs[k].eigenfunction.view(),
                                             reference.pairs[k].eigenfunction.view(),
                                             reference.weights);
        if (ip < 0.0) flip(candidate, k);
    }
}

fda::MfpcaModel fit_at_most(std::span<const FieldView> samples, std::size_t components,
                            ReplicateResult& result) {
    try {
        return fda::fit_mfpca(samples, fda::ComponentCount{components});
    } catch (const FdaError& e) {
        result.flagged = true;
        result.note = e.what();
    }
    // Keep whatever the replicate supports.
    fda::MfpcaModel full;
    try {
        full = fda::fit_mfpca(samples, fda::VarianceThreshold{1.0});
    } catch (const FdaError&) {
        // Rank 0: every drawn sample is identical. Only the mean is comparable.
        full.grid = samples.front().grid;
        full.weights = QuadratureWeights::trapezoid(full.grid);
        full.mean = fda::mean_function(samples);
        full.n_samples = samples.size();
        return full;
    }
    const std::size_t keep = std::min(components, full.components());
    if (keep < full.components()) {
        full = fda::fit_mfpca(samples, fda::ComponentCount{keep});
    }
    return full;
}

}  // namespace

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    if (bound == 0) throw BootstrapError("empty sampling range");
    // Reject the low 2^64 mod bound values so every residue is equally likely.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) return r % bound;
    }
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate) {
    SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (static_cast<std::uint64_t>(replicate) + 1)));
    return mix.next();
}

std::vector<std::size_t> resample_indices(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
    return idx;
}

std::vector<density::FunctionalSample> resample(std::span<const density::FunctionalSample> samples,
                                                std::uint64_t seed) {
    std::vector<density::FunctionalSample> out;
    out.reserve(samples.size());
    for (auto i : resample_indices(samples.size(), seed)) out.push_back(samples[i]);
    return out;
}

fda::MfpcaModel align_signs(const fda::MfpcaModel& reference, const fda::MfpcaModel& candidate) {
    if (reference.grid != candidate.grid) throw BootstrapError("models are on different grids");
    if (reference.components() != candidate.components()) {
        throw BootstrapError("models have different component counts (" +
                             std::to_string(reference.components()) + " vs " +
                             std::to_string(candidate.components()) + ")");
    }
    fda::MfpcaModel out = candidate;
    align_prefix(reference, out);
    return out;
}

std::vector<double> StabilityReport::mean_alignment() const {
    std::vector<double> sums(components, 0.0);
    std::size_t used = 0;
    for (const auto& r : replicates) {
        if (r.flagged) continue;
        ++used;
        for (std::size_t k = 0; k < components; ++k) sums[k] += r.alignment[k];
    }
    if (used > 0) {
        for (auto& s : sums) s /= static_cast<double>(used);
    }
    return sums;
}

StabilityReport stability_study(std::span<const FieldView> samples, const StudyOptions& options,
                                fda::MfpcaModel* reference) {
    if (options.replicates < 1) throw BootstrapError("need at least one bootstrap replicate");
    const std::size_t k = options.components;

    fda::MfpcaModel ref = fda::fit_mfpca(samples, fda::ComponentCount{k}, options.threads);

    StabilityReport report;
    report.components = k;
    report.seed = options.seed;
    report.reference_eigenvalues = ref.eigenvalues();
    report.replicates.resize(options.replicates);

    parallel_for(options.replicates, options.threads, [&](std::size_t r) {
        ReplicateResult& result = report.replicates[r];
        result.replicate = r;
        result.seed = replicate_seed(options.seed, r);
        const auto idx = resample_indices(samples.size(), result.seed);
        result.distinct_samples = std::set<std::size_t>(idx.begin(), idx.end()).size();

        std::vector<FieldView> drawn;
        drawn.reserve(idx.size());
        for (auto i : idx) drawn.push_back(samples[i]);

        fda::MfpcaModel boot = fit_at_most(drawn, k, result);
        align_prefix(ref, boot);

        result.fitted_components = boot.components();
        result.alignment.assign(k, 0.0);
        result.eigenvalue_ratio.assign(k, 0.0);
        for (std::size_t c = 0; c < boot.components(); ++c) {
            result.alignment[c] = std::min(
                1.0, std::abs(fda::inner_product(boot.pairs[c].eigenfunction.view(),
                                                 ref.pairs[c].eigenfunction.view(), ref.weights)));
            result.eigenvalue_ratio[c] = boot.pairs[c].eigenvalue / ref.pairs[c].eigenvalue;
        }
        result.mean_distance = fda::h_distance(boot.mean.view(), ref.mean.view(), ref.weights);
        if (options.keep_models) result.model = std::move(boot);
    });

    if (reference != nullptr) *reference = std::move(ref);
    return report;
}

}  // namespace courtfda::bootstrap

#pragma once

#include "courtfda/density.hpp"
#include "courtfda/fda.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace courtfda::bootstrap {

/// SplitMix64 (Steele, Lea & Flood 2014): 64-bit state, output fully
/// specified, so a seed yields the same stream on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    /// Uniform integer in [0, bound) by rejection, bound > 0.
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

/// Seed of replicate r's private stream, derived only from (seed, r).
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate);

/// n indices drawn uniformly with replacement.
std::vector<std::size_t> resample_indices(std::size_t n, std::uint64_t seed);

std::vector<density::FunctionalSample> resample(std::span<const density::FunctionalSample> samples,
                                                std::uint64_t seed);

/// Flips each candidate eigenfunction (and its score column) so that
/// <phi_cand, phi_ref>_H >= 0. Throws BootstrapError on grid or component
/// count mismatch.
fda::MfpcaModel align_signs(const fda::MfpcaModel& reference, const fda::MfpcaModel& candidate);

struct ReplicateResult {
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    std::size_t distinct_samples = 0;
    bool flagged = false;  // numerical rank fell below the requested K
    std::string note;
    std::size_t fitted_components = 0;
    std::vector<double> alignment;         // |<phi_k^boot, phi_k^ref>|, 0 when not fitted
    std::vector<double> eigenvalue_ratio;  // lambda_k^boot / lambda_k^ref, 0 when not fitted
    double mean_distance = 0.0;            // ||mu^boot - mu^ref||_H
    std::optional<fda::MfpcaModel> model;  // sign-aligned, kept on request
};

struct StabilityReport {
    std::size_t components = 0;
    std::uint64_t seed = 0;
    std::vector<double> reference_eigenvalues;
    std::vector<ReplicateResult> replicates;

    /// Per component, the average alignment over unflagged replicates.
    std::vector<double> mean_alignment() const;
};

struct StudyOptions {
    std::size_t replicates = 5;
    std::size_t components = 4;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    bool keep_models = false;
};

/// Fits the reference on the full data, refits on player-level resamples and
/// compares component k to component k after sign alignment. Replicates run
/// concurrently on independent streams. Returns the reference model through
/// `reference` when it is non-null.
StabilityReport stability_study(std::span<const FieldView> samples, const StudyOptions& options,
                                fda::MfpcaModel* reference = nullptr);

}  // namespace courtfda::bootstrap

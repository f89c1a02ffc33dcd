#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "e2f/tensor.hpp"

namespace e2f {

struct RecordingMeta {
    double sampling_rate_hz = 0.0;
    double tr_seconds = 0.0;
    int n_electrodes = 0;
    std::string subject_id;

    // round(f_s * f_TR); exact where the product is integral
    std::size_t window_length() const;
    void validate() const;
};

struct RawEegRecording {
    RecordingMeta meta;
    Tensor samples;  // C x L

    void validate() const;
};

struct EegSpectrogramSample {
    Tensor values;  // T x C x F
    std::string subject_id;
    int volume_index = 0;
};

struct FmriVolume {
    Tensor values;  // D x W x H
    std::string subject_id;
    int volume_index = 0;
};

struct SamplePair {
    EegSpectrogramSample eeg;
    FmriVolume fmri;
};

struct PreprocessConfig {
    int temporal_context = 20;
    int cutoff_bins = 250;
    bool remove_dc = true;
    std::string alignment = "causal-end";

    int feature_dim() const { return cutoff_bins - (remove_dc ? 1 : 0); }
    void validate() const;
    bool operator==(const PreprocessConfig&) const = default;
};

struct EegNormExtrema {
    double min = 0.0;
    double max = 0.0;
};

// Non-overlapping windows of window_length samples; trailing remainder is
// discarded. Each window is C x window_length.
std::vector<Tensor> segment_windows(const RawEegRecording& recording);

// Per-electrode DFT magnitudes of one window: keep bins below cutoff_bins,
// drop the DC bin when configured, giving C x F.
Tensor fft_features(const Tensor& window, const PreprocessConfig& config);

// Sample j stacks window features [j, j+T) and is paired with the volume
// acquired at window j+T-1 (causal end of the context).
std::vector<EegSpectrogramSample> stack_temporal_context(
    const std::vector<Tensor>& window_features, const PreprocessConfig& config,
    const std::string& subject_id);

// Affine map onto [0, 1] using the global extrema over every value of every
// sample; applied in place. The extrema are returned for reuse on held-out data.
EegNormExtrema normalize_eeg_global(std::vector<EegSpectrogramSample>& samples);
void apply_eeg_norm(EegSpectrogramSample& sample, const EegNormExtrema& extrema);

// Per-volume min-max scaling; constant volumes map to all zeros.
FmriVolume normalize_fmri_per_volume(const FmriVolume& volume);

// 3-D orthonormal DCT-II, truncation to the lowest-frequency target_d x
// target_w x target_h coefficients, DCT-III at the target size, then
// per-volume min-max rescaling.
Tensor dct_downsample_volume(const Tensor& volume, std::size_t target_d,
                             std::size_t target_w, std::size_t target_h);

// segment_windows -> fft_features -> stack_temporal_context, pairing sample j
// with volume j+T-1. Volumes without a full EEG context are dropped. Output
// is unnormalized; dataset-level EEG and per-volume fMRI normalization are
// applied by the loading layer.
std::vector<SamplePair> build_pairs(const RawEegRecording& recording,
                                    const std::vector<FmriVolume>& volumes,
                                    const PreprocessConfig& config);

}  // namespace e2f

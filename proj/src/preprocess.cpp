#include "e2f/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "e2f/dct.hpp"
#include "e2f/fft.hpp"

namespace e2f {

std::size_t RecordingMeta::window_length() const {
    return static_cast<std::size_t>(std::llround(sampling_rate_hz * tr_seconds));
}

void RecordingMeta::validate() const {
    if (sampling_rate_hz <= 0.0) throw std::invalid_argument("sampling_rate_hz must be positive");
    if (tr_seconds <= 0.0) throw std::invalid_argument("tr_seconds must be positive");
    if (n_electrodes < 1) throw std::invalid_argument("n_electrodes must be at least 1");
    if (window_length() < 2) throw std::invalid_argument("window_length must be at least 2");
}

void RawEegRecording::validate() const {
    meta.validate();
    if (samples.ndim() != 2) throw std::invalid_argument("eeg samples must be 2-d (C x L)");
    if (samples.dims[0] != static_cast<std::size_t>(meta.n_electrodes))
        throw std::invalid_argument("eeg channel count does not match metadata");
    if (samples.dims[1] < meta.window_length()) throw std::runtime_error("recording too short");
}

void PreprocessConfig::validate() const {
    if (temporal_context < 1) throw std::invalid_argument("temporal_context must be positive");
    if (cutoff_bins < 1) throw std::invalid_argument("cutoff_bins must be positive");
    if (feature_dim() < 1) throw std::invalid_argument("feature_dim must be positive");
    if (alignment != "causal-end") throw std::invalid_argument("unknown alignment: " + alignment);
}

std::vector<Tensor> segment_windows(const RawEegRecording& recording) {
    recording.validate();
    const std::size_t c = recording.samples.dims[0];
    const std::size_t l = recording.samples.dims[1];
    const std::size_t wl = recording.meta.window_length();
    if (l < wl) throw std::runtime_error("recording too short");
    const std::size_t n = l / wl;
    std::vector<Tensor> windows;
    windows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Tensor w({c, wl});
        for (std::size_t e = 0; e < c; ++e)
            for (std::size_t t = 0; t < wl; ++t) w.at2(e, t) = recording.samples.at2(e, i * wl + t);
        windows.push_back(std::move(w));
    }
    return windows;
}

Tensor fft_features(const Tensor& window, const PreprocessConfig& config) {
    if (window.ndim() != 2) throw std::invalid_argument("window must be 2-d (C x window_length)");
    config.validate();
    const std::size_t c = window.dims[0];
    const std::size_t wl = window.dims[1];
    const std::size_t cutoff = static_cast<std::size_t>(config.cutoff_bins);
    if (wl < cutoff) throw std::runtime_error("window too short for cutoff");
    const std::size_t first = config.remove_dc ? 1 : 0;
    const std::size_t f = static_cast<std::size_t>(config.feature_dim());
    Dft dft(wl);
    Tensor out({c, f});
    std::vector<double> line(wl);
    for (std::size_t e = 0; e < c; ++e) {
        for (std::size_t t = 0; t < wl; ++t) line[t] = window.at2(e, t);
        auto mag = dft.magnitudes(line);
        for (std::size_t k = 0; k < f; ++k) out.at2(e, k) = mag[first + k];
    }
    return out;
}

std::vector<EegSpectrogramSample> stack_temporal_context(
    const std::vector<Tensor>& window_features, const PreprocessConfig& config,
    const std::string& subject_id) {
    config.validate();
    const std::size_t t = static_cast<std::size_t>(config.temporal_context);
    if (window_features.size() < t) throw std::runtime_error("insufficient temporal context");
    const std::size_t c = window_features[0].dims[0];
    const std::size_t f = window_features[0].dims[1];
    for (const auto& w : window_features)
        if (w.dims != window_features[0].dims)
            throw std::invalid_argument("window feature shapes differ");
    const std::size_t n = window_features.size() - t + 1;
    std::vector<EegSpectrogramSample> samples;
    samples.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        EegSpectrogramSample s;
        s.values = Tensor({t, c, f});
        for (std::size_t i = 0; i < t; ++i) {
            const Tensor& w = window_features[j + i];
            for (std::size_t e = 0; e < c; ++e)
                for (std::size_t k = 0; k < f; ++k) s.values.at3(i, e, k) = w.at2(e, k);
        }
        s.subject_id = subject_id;
        s.volume_index = static_cast<int>(j + t - 1);
        samples.push_back(std::move(s));
    }
    return samples;
}

EegNormExtrema normalize_eeg_global(std::vector<EegSpectrogramSample>& samples) {
    if (samples.empty()) throw std::runtime_error("degenerate dataset");
    double gmin = std::numeric_limits<double>::infinity();
    double gmax = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        gmin = std::min(gmin, min_value(s.values));
        gmax = std::max(gmax, max_value(s.values));
    }
    if (gmax == gmin) throw std::runtime_error("degenerate dataset");
    EegNormExtrema extrema{gmin, gmax};
    for (auto& s : samples) apply_eeg_norm(s, extrema);
    return extrema;
}

void apply_eeg_norm(EegSpectrogramSample& sample, const EegNormExtrema& extrema) {
    if (extrema.max == extrema.min) throw std::runtime_error("degenerate dataset");
    const double scale = 1.0 / (extrema.max - extrema.min);
    for (double& v : sample.values.data) v = (v - extrema.min) * scale;
}

FmriVolume normalize_fmri_per_volume(const FmriVolume& volume) {
    FmriVolume out = volume;
    const double lo = min_value(volume.values);
    const double hi = max_value(volume.values);
    if (hi == lo) {
        std::fill(out.values.data.begin(), out.values.data.end(), 0.0);
        return out;
    }
    const double scale = 1.0 / (hi - lo);
    for (double& v : out.values.data) v = (v - lo) * scale;
    return out;
}

Tensor dct_downsample_volume(const Tensor& volume, std::size_t target_d, std::size_t target_w,
                             std::size_t target_h) {
    if (volume.ndim() != 3) throw std::invalid_argument("volume must be 3-d");
    if (target_d > volume.dims[0] || target_w > volume.dims[1] || target_h > volume.dims[2])
        throw std::runtime_error("cannot upsample");
    Tensor coeff = dct2_3d(volume);
    Tensor kept({target_d, target_w, target_h});
    for (std::size_t i = 0; i < target_d; ++i)
        for (std::size_t j = 0; j < target_w; ++j)
            for (std::size_t k = 0; k < target_h; ++k) kept.at3(i, j, k) = coeff.at3(i, j, k);
    Tensor small = dct3_3d(kept);
    FmriVolume wrapped;
    wrapped.values = std::move(small);
    return normalize_fmri_per_volume(wrapped).values;
}

std::vector<SamplePair> build_pairs(const RawEegRecording& recording,
                                    const std::vector<FmriVolume>& volumes,
                                    const PreprocessConfig& config) {
    config.validate();
    auto windows = segment_windows(recording);
    if (volumes.size() < windows.size()) throw std::runtime_error("alignment mismatch");
    std::vector<Tensor> features;
    features.reserve(windows.size());
    for (const auto& w : windows) features.push_back(fft_features(w, config));
    auto samples = stack_temporal_context(features, config, recording.meta.subject_id);
    std::vector<SamplePair> pairs;
    pairs.reserve(samples.size());
    for (auto& s : samples) {
        SamplePair p;
        const std::size_t vi = static_cast<std::size_t>(s.volume_index);
        p.fmri = volumes[vi];
        p.fmri.subject_id = recording.meta.subject_id;
        p.fmri.volume_index = s.volume_index;
        p.eeg = std::move(s);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace e2f

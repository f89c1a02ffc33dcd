#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "e2f/preprocess.hpp"

namespace e2f {

struct SubjectEntry {
    std::string subject_id;
    std::string eeg_path;                  // relative to the dataset root
    std::vector<std::string> fmri_paths;   // ordered by acquisition index
    RecordingMeta meta;
};

struct DatasetManifest {
    std::string name;
    PreprocessConfig preprocess;
    EegNormExtrema eeg_norm;
    std::vector<SubjectEntry> subjects;
    std::string root_dir;  // not serialized; set when reading

    std::vector<std::string> subject_ids() const;
    const SubjectEntry& subject(const std::string& id) const;
};

void write_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest read_manifest(const std::string& path);

struct SyntheticGeometry {
    int t = 20;
    int c = 64;
    int f = 249;
    int d = 30;
    int w = 64;
    int h = 64;
};

// Desk-scale paired generator: each volume is a sum of Gaussian blobs; the
// raw EEG window acquired with it carries the blob parameters through a
// fixed positive linear map onto per-electrode sinusoid amplitudes, so the
// EEG -> fMRI mapping is deterministic and learnable. Sampling rate is
// F+1 Hz with a 2 s TR, giving windows of 2(F+1) samples.
struct SyntheticSpec {
    int n_subjects = 4;
    int volumes_per_subject = 30;
    SyntheticGeometry geometry;
    int blob_count = 3;
    double noise_std = 0.02;
    std::uint64_t seed = 0;

    void validate() const;
};

// Writes <root>/manifest.json, <root>/<subject>/eeg.e2f and
// <root>/<subject>/fmri_<index>.e2f; manifest written last as commit point.
DatasetManifest generate_synthetic(const SyntheticSpec& spec, const std::string& root_dir);

// Runs build_pairs per subject with the manifest's config, applies the
// stored EEG extrema and per-volume fMRI normalization. Ordering is stable:
// manifest subject order, then volume index.
std::vector<SamplePair> load_pairs(const DatasetManifest& manifest,
                                   const std::vector<std::string>& subjects);

// Deterministic shuffle keyed by (seed, epoch); final partial batch included.
std::vector<std::vector<std::size_t>> batch(std::size_t n_pairs, std::size_t batch_size,
                                            std::uint64_t seed, std::uint64_t epoch);

}  // namespace e2f

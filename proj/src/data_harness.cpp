#include "e2f/data_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "e2f/config_json.hpp"
#include "e2f/rng.hpp"
#include "e2f/tensor_file.hpp"

namespace e2f {

std::vector<std::string> DatasetManifest::subject_ids() const {
    std::vector<std::string> ids;
    ids.reserve(subjects.size());
    for (const auto& s : subjects) ids.push_back(s.subject_id);
    return ids;
}

const SubjectEntry& DatasetManifest::subject(const std::string& id) const {
    for (const auto& s : subjects)
        if (s.subject_id == id) return s;
    throw std::invalid_argument("unknown subject: " + id);
}

namespace {

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> keys,
                  const std::string& context) {
    for (const char* k : keys)
        if (!j.contains(k)) throw std::runtime_error(context + ": missing key '" + k + "'");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(keys.begin(), keys.end(),
                         [&](const char* k) { return key == k; }) == keys.end())
            throw std::runtime_error(context + ": unknown key '" + key + "'");
    }
}

}  // namespace

void write_manifest(const DatasetManifest& manifest, const std::string& path) {
    nlohmann::json subjects = nlohmann::json::array();
    for (const auto& s : manifest.subjects) {
        subjects.push_back({{"subject_id", s.subject_id},
                            {"eeg_path", s.eeg_path},
                            {"fmri_paths", s.fmri_paths},
                            {"meta",
                             {{"sampling_rate_hz", s.meta.sampling_rate_hz},
                              {"tr_seconds", s.meta.tr_seconds},
                              {"n_electrodes", s.meta.n_electrodes}}}});
    }
    nlohmann::json j{{"name", manifest.name},
                     {"preprocess", preprocess_to_json(manifest.preprocess)},
                     {"eeg_norm", {{"min", manifest.eeg_norm.min}, {"max", manifest.eeg_norm.max}}},
                     {"subjects", subjects}};
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
}

DatasetManifest read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("manifest parse failure at " + path + ": " + e.what());
    }
    require_keys(j, {"name", "preprocess", "eeg_norm", "subjects"}, path);
    DatasetManifest m;
    m.name = j.at("name").get<std::string>();
    m.preprocess = preprocess_from_json(j.at("preprocess"));
    require_keys(j.at("eeg_norm"), {"min", "max"}, path + ": eeg_norm");
    m.eeg_norm.min = j.at("eeg_norm").at("min").get<double>();
    m.eeg_norm.max = j.at("eeg_norm").at("max").get<double>();
    for (const auto& js : j.at("subjects")) {
        require_keys(js, {"subject_id", "eeg_path", "fmri_paths", "meta"}, path + ": subject");
        SubjectEntry s;
        s.subject_id = js.at("subject_id").get<std::string>();
        s.eeg_path = js.at("eeg_path").get<std::string>();
        s.fmri_paths = js.at("fmri_paths").get<std::vector<std::string>>();
        const auto& jm = js.at("meta");
        require_keys(jm, {"sampling_rate_hz", "tr_seconds", "n_electrodes"}, path + ": meta");
        s.meta.sampling_rate_hz = jm.at("sampling_rate_hz").get<double>();
        s.meta.tr_seconds = jm.at("tr_seconds").get<double>();
        s.meta.n_electrodes = jm.at("n_electrodes").get<int>();
        s.meta.subject_id = s.subject_id;
        m.subjects.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < m.subjects.size(); ++i)
        for (std::size_t k = i + 1; k < m.subjects.size(); ++k)
            if (m.subjects[i].subject_id == m.subjects[k].subject_id)
                throw std::runtime_error("duplicate subject_id: " + m.subjects[i].subject_id);
    m.root_dir = std::filesystem::path(path).parent_path().string();
    return m;
}

void SyntheticSpec::validate() const {
    if (n_subjects < 1) throw std::invalid_argument("n_subjects must be positive");
    if (volumes_per_subject < 1) throw std::invalid_argument("volumes_per_subject must be positive");
    if (blob_count < 1) throw std::invalid_argument("blob_count must be positive");
    if (noise_std < 0.0) throw std::invalid_argument("noise_std must be non-negative");
    if (geometry.t < 1 || geometry.c < 1 || geometry.f < 1 || geometry.d < 1 || geometry.w < 1 ||
        geometry.h < 1)
        throw std::invalid_argument("geometry dims must be positive");
    if (volumes_per_subject < geometry.t)
        throw std::invalid_argument("volumes_per_subject must be at least the temporal context");
    if (geometry.f < 5 * blob_count)
        throw std::invalid_argument("frequency dim too small for blob parameter encoding");
}

namespace {

// Raw, unnormalized pairs for one subject, straight from the files.
std::vector<SamplePair> subject_pairs(const DatasetManifest& manifest, const SubjectEntry& entry) {
    const std::string root = manifest.root_dir.empty() ? "." : manifest.root_dir;
    RawEegRecording recording;
    recording.meta = entry.meta;
    recording.meta.subject_id = entry.subject_id;
    recording.samples = read_tensor(root + "/" + entry.eeg_path);
    if (recording.samples.ndim() != 2 ||
        recording.samples.dims[0] != static_cast<std::size_t>(entry.meta.n_electrodes))
        throw std::runtime_error("manifest/config mismatch: eeg tensor " + entry.eeg_path +
                                 " is " + shape_str(recording.samples.dims));
    std::vector<FmriVolume> volumes;
    volumes.reserve(entry.fmri_paths.size());
    for (std::size_t i = 0; i < entry.fmri_paths.size(); ++i) {
        FmriVolume v;
        v.values = read_tensor(root + "/" + entry.fmri_paths[i]);
        if (v.values.ndim() != 3)
            throw std::runtime_error("manifest/config mismatch: volume " + entry.fmri_paths[i] +
                                     " is " + shape_str(v.values.dims));
        v.subject_id = entry.subject_id;
        v.volume_index = static_cast<int>(i);
        volumes.push_back(std::move(v));
    }
    return build_pairs(recording, volumes, manifest.preprocess);
}

struct Blob {
    double cz, cy, cx;    // centers in voxel units
    double width;         // per-axis sigma as a fraction of that axis
    double amp;
};

constexpr double kWidthLo = 0.1, kWidthHi = 0.3;
constexpr double kAmpLo = 0.3, kAmpHi = 1.0;

std::vector<Blob> sample_blobs(Rng& rng, const SyntheticGeometry& g, int blob_count) {
    std::vector<Blob> blobs(blob_count);
    for (auto& b : blobs) {
        b.cz = rng.uniform(0.0, static_cast<double>(g.d));
        b.cy = rng.uniform(0.0, static_cast<double>(g.w));
        b.cx = rng.uniform(0.0, static_cast<double>(g.h));
        b.width = rng.uniform(kWidthLo, kWidthHi);
        b.amp = rng.uniform(kAmpLo, kAmpHi);
    }
    return blobs;
}

Tensor render_volume(const std::vector<Blob>& blobs, const SyntheticGeometry& g) {
    Tensor v = Tensor::zeros({static_cast<std::size_t>(g.d), static_cast<std::size_t>(g.w),
                              static_cast<std::size_t>(g.h)});
    const double inv_count = 1.0 / static_cast<double>(blobs.size());
    for (const auto& b : blobs) {
        const double sz = b.width * g.d, sy = b.width * g.w, sx = b.width * g.h;
        for (int z = 0; z < g.d; ++z) {
            const double dz = (z - b.cz) / sz;
            for (int y = 0; y < g.w; ++y) {
                const double dy = (y - b.cy) / sy;
                for (int x = 0; x < g.h; ++x) {
                    const double dx = (x - b.cx) / sx;
                    v.at3(static_cast<std::size_t>(z), static_cast<std::size_t>(y),
                          static_cast<std::size_t>(x)) +=
                        b.amp * std::exp(-0.5 * (dz * dz + dy * dy + dx * dx)) * inv_count;
                }
            }
        }
    }
    return v;
}

// normalized blob parameters in [0,1], 5 per blob
std::vector<double> blob_features(const std::vector<Blob>& blobs, const SyntheticGeometry& g) {
    std::vector<double> p;
    p.reserve(blobs.size() * 5);
    for (const auto& b : blobs) {
        p.push_back(b.cz / g.d);
        p.push_back(b.cy / g.w);
        p.push_back(b.cx / g.h);
        p.push_back((b.width - kWidthLo) / (kWidthHi - kWidthLo));
        p.push_back((b.amp - kAmpLo) / (kAmpHi - kAmpLo));
    }
    return p;
}

// K distinct carrier bins spread over [1, F] (raw DFT bins, all below Nyquist)
std::vector<std::size_t> carrier_bins(int f, std::size_t k) {
    std::vector<std::size_t> bins(k);
    for (std::size_t i = 0; i < k; ++i)
        bins[i] = 1 + (i * static_cast<std::size_t>(f)) / k;
    return bins;
}

}  // namespace

DatasetManifest generate_synthetic(const SyntheticSpec& spec, const std::string& root_dir) {
    spec.validate();
    const SyntheticGeometry& g = spec.geometry;
    const std::size_t n_params = static_cast<std::size_t>(5 * spec.blob_count);
    const auto bins = carrier_bins(g.f, n_params);
    const std::size_t wl = 2 * static_cast<std::size_t>(g.f + 1);
    const double two_pi = 2.0 * 3.14159265358979323846;

    // dataset-level positive map: blob parameter k -> electrode c amplitude
    Rng map_rng(mix64(spec.seed, 1));
    std::vector<double> mix(static_cast<std::size_t>(g.c) * n_params);
    for (double& v : mix) v = map_rng.uniform(0.2, 1.0);

    std::filesystem::create_directories(root_dir);
    DatasetManifest manifest;
    manifest.name = "synthetic";
    manifest.preprocess.temporal_context = g.t;
    manifest.preprocess.cutoff_bins = g.f + 1;
    manifest.preprocess.remove_dc = true;
    manifest.root_dir = root_dir;

    for (int s = 0; s < spec.n_subjects; ++s) {
        char id[16];
        std::snprintf(id, sizeof(id), "s%02d", s);
        SubjectEntry entry;
        entry.subject_id = id;
        entry.eeg_path = std::string(id) + "/eeg.e2f";
        entry.meta.sampling_rate_hz = static_cast<double>(g.f + 1);
        entry.meta.tr_seconds = 2.0;
        entry.meta.n_electrodes = g.c;
        entry.meta.subject_id = id;
        std::filesystem::create_directories(root_dir + "/" + id);

        Rng blob_rng(mix64(mix64(spec.seed, 2), static_cast<std::uint64_t>(s)));
        Rng noise_rng(mix64(mix64(spec.seed, 3), static_cast<std::uint64_t>(s)));

        Tensor eeg({static_cast<std::size_t>(g.c),
                    static_cast<std::size_t>(spec.volumes_per_subject) * wl});
        for (int vol = 0; vol < spec.volumes_per_subject; ++vol) {
            const auto blobs = sample_blobs(blob_rng, g, spec.blob_count);
            const auto p = blob_features(blobs, g);
            const Tensor volume = render_volume(blobs, g);
            char vol_name[32];
            std::snprintf(vol_name, sizeof(vol_name), "fmri_%03d.e2f", vol);
            const std::string rel = std::string(id) + "/" + vol_name;
            write_tensor(root_dir + "/" + rel, volume);
            entry.fmri_paths.push_back(rel);

            const std::size_t base = static_cast<std::size_t>(vol) * wl;
            for (int c = 0; c < g.c; ++c) {
                for (std::size_t t = 0; t < wl; ++t) {
                    double v = 0.0;
                    for (std::size_t k = 0; k < n_params; ++k) {
                        const double amp = mix[static_cast<std::size_t>(c) * n_params + k] * p[k];
                        v += amp * std::cos(two_pi * static_cast<double>(bins[k]) *
                                            static_cast<double>(t) / static_cast<double>(wl));
                    }
                    if (spec.noise_std > 0.0) v += spec.noise_std * noise_rng.normal();
                    eeg.at2(static_cast<std::size_t>(c), base + t) = v;
                }
            }
        }
        write_tensor(root_dir + "/" + entry.eeg_path, eeg);
        manifest.subjects.push_back(std::move(entry));
    }

    // global EEG extrema over the feature values loaders will actually see
    double gmin = std::numeric_limits<double>::infinity();
    double gmax = -std::numeric_limits<double>::infinity();
    for (const auto& entry : manifest.subjects) {
        for (const auto& pair : subject_pairs(manifest, entry)) {
            gmin = std::min(gmin, min_value(pair.eeg.values));
            gmax = std::max(gmax, max_value(pair.eeg.values));
        }
    }
    if (gmax == gmin) throw std::runtime_error("degenerate dataset");
    manifest.eeg_norm = {gmin, gmax};
    write_manifest(manifest, root_dir + "/manifest.json");
    return manifest;
}

std::vector<SamplePair> load_pairs(const DatasetManifest& manifest,
                                   const std::vector<std::string>& subjects) {
    for (const auto& id : subjects) manifest.subject(id);  // validate membership
    std::vector<SamplePair> pairs;
    for (const auto& entry : manifest.subjects) {
        if (std::find(subjects.begin(), subjects.end(), entry.subject_id) == subjects.end())
            continue;
        for (auto& pair : subject_pairs(manifest, entry)) {
            apply_eeg_norm(pair.eeg, manifest.eeg_norm);
            pair.fmri = normalize_fmri_per_volume(pair.fmri);
            pairs.push_back(std::move(pair));
        }
    }
    return pairs;
}

std::vector<std::vector<std::size_t>> batch(std::size_t n_pairs, std::size_t batch_size,
                                            std::uint64_t seed, std::uint64_t epoch) {
    if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
    std::vector<std::size_t> order(n_pairs);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix64(seed, epoch));
    for (std::size_t i = n_pairs; i > 1; --i) {
        const std::size_t j = rng.below(i);
        std::swap(order[i - 1], order[j]);
    }
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t at = 0; at < n_pairs; at += batch_size) {
        const std::size_t end = std::min(n_pairs, at + batch_size);
        batches.emplace_back(order.begin() + static_cast<long>(at),
                             order.begin() + static_cast<long>(end));
    }
    return batches;
}

}  // namespace e2f

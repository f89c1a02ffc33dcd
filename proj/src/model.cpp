#include "e2f/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "e2f/parallel.hpp"
#include "e2f/rng.hpp"

namespace e2f {

// ---------------------------------------------------------------------------
// Config

void ArchitectureConfig::validate() const {
    auto fail = [](const std::string& why) {
        throw std::invalid_argument("invalid architecture: " + why);
    };
    if (input_t < 1 || input_c < 1 || input_f < 1) fail("input dims must be positive");
    if (feature_depth < 1 || out_d < 1 || out_w < 1 || out_h < 1) fail("output dims must be positive");
    if (encoder_depths.empty()) fail("encoder_depths empty");
    if (encoder_kernels.size() != encoder_depths.size() ||
        encoder_strides.size() != encoder_depths.size())
        fail("encoder stage lists must have equal length");
    if (encoder_depths.back() != feature_depth) fail("last encoder depth must equal feature_depth");
    for (int d : encoder_depths)
        if (d < 1) fail("encoder depth must be positive");
    for (auto [kc, kf] : encoder_kernels) {
        if (kc != 1) fail("kernel electrode extent must be 1");
        if (kf <= 1) fail("kernel frequency extent must exceed 1");
        if (kf % 2 == 0) fail("kernel frequency extent must be odd");
    }
    for (auto [sc, sf] : encoder_strides) {
        if (sc != 1) fail("stride electrode extent must be 1");
        if (sf < 1) fail("stride frequency extent must be positive");
    }
    if (feature_depth < out_d) fail("feature_depth must be at least out_d");
    if (out_w % 4 != 0 || out_h % 4 != 0) fail("out_w and out_h must be divisible by 4");
    if (input_c < 2) fail("input_c must be at least 2 for resizing");
    auto extents = encoder_freq_extents();
    if (extents.back() < 2) fail("frequency extent collapses below 2");
}

std::vector<int> ArchitectureConfig::encoder_freq_extents() const {
    std::vector<int> extents;
    int f = input_f;
    for (std::size_t i = 0; i < encoder_kernels.size(); ++i) {
        const int k = encoder_kernels[i].second;
        const int s = encoder_strides[i].second;
        const int pad = (k - 1) / 2;
        f = (f + 2 * pad - k) / s + 1;
        if (f < 1) throw std::invalid_argument("invalid architecture: frequency extent vanishes");
        extents.push_back(f);
    }
    return extents;
}

std::vector<int> ArchitectureConfig::decoder_depths() const {
    return {feature_depth, std::max(feature_depth / 2, out_d), std::max(feature_depth / 4, out_d),
            out_d};
}

// ---------------------------------------------------------------------------
// Parameter layout — one deterministic ordering shared by init, checkpointing
// and the backward pass.

namespace {

struct ParamDef {
    std::string name;
    std::vector<std::size_t> shape;
    enum Kind { conv_weight, zeros, ones } kind;
};

void push_conv(std::vector<ParamDef>& defs, const std::string& prefix, int out_ch, int in_ch,
               int kh, int kw) {
    defs.push_back({prefix + ".weight",
                    {static_cast<std::size_t>(out_ch), static_cast<std::size_t>(in_ch),
                     static_cast<std::size_t>(kh), static_cast<std::size_t>(kw)},
                    ParamDef::conv_weight});
    defs.push_back({prefix + ".bias", {static_cast<std::size_t>(out_ch)}, ParamDef::zeros});
}

void push_norm(std::vector<ParamDef>& defs, const std::string& prefix, int ch) {
    defs.push_back({prefix + ".gain", {static_cast<std::size_t>(ch)}, ParamDef::ones});
    defs.push_back({prefix + ".bias", {static_cast<std::size_t>(ch)}, ParamDef::zeros});
}

std::vector<ParamDef> param_defs(const ArchitectureConfig& c) {
    std::vector<ParamDef> defs;
    int in_ch = c.input_t;
    for (std::size_t i = 0; i < c.encoder_depths.size(); ++i) {
        const std::string prefix = "encoder." + std::to_string(i);
        push_conv(defs, prefix + ".conv", c.encoder_depths[i], in_ch, 1, c.encoder_kernels[i].second);
        push_norm(defs, prefix + ".norm", c.encoder_depths[i]);
        in_ch = c.encoder_depths[i];
    }
    const int n = c.feature_depth;
    for (int j = 0; j < 2; ++j) {
        const std::string prefix = "unet.down." + std::to_string(j);
        push_conv(defs, prefix + ".conv", n, n, 3, 3);
        push_norm(defs, prefix + ".norm", n);
    }
    for (int j = 0; j < 2; ++j) {
        const std::string prefix = "unet.up." + std::to_string(j);
        push_conv(defs, prefix + ".conv", n, n, 3, 3);
        push_norm(defs, prefix + ".norm", n);
        push_conv(defs, prefix + ".fuse", n, 2 * n, 1, 1);
        push_norm(defs, prefix + ".fuse_norm", n);
    }
    const auto dd = c.decoder_depths();
    for (int i = 0; i < 3; ++i) {
        const std::string prefix = "decoder." + std::to_string(i);
        push_conv(defs, prefix + ".conv", dd[i + 1], dd[i], 3, 3);
        if (i < 2) push_norm(defs, prefix + ".norm", dd[i + 1]);
    }
    return defs;
}

// base index of each 4-tensor block (weight, bias, gain, norm bias)
struct Layout {
    std::vector<std::size_t> encoder;
    std::size_t down0, down1;
    std::size_t up0_conv, up0_fuse, up1_conv, up1_fuse;
    std::size_t dec0, dec1, dec2;
};

Layout make_layout(const ArchitectureConfig& c) {
    Layout l;
    std::size_t at = 0;
    for (std::size_t i = 0; i < c.encoder_depths.size(); ++i) {
        l.encoder.push_back(at);
        at += 4;
    }
    l.down0 = at;
    l.down1 = at + 4;
    l.up0_conv = at + 8;
    l.up0_fuse = at + 12;
    l.up1_conv = at + 16;
    l.up1_fuse = at + 20;
    l.dec0 = at + 24;
    l.dec1 = at + 28;
    l.dec2 = at + 32;
    return l;
}

}  // namespace

const Tensor& ModelParams::find(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return values[i];
    throw std::invalid_argument("unknown parameter: " + name);
}

ModelParams init_params(const ArchitectureConfig& config, std::uint64_t seed) {
    config.validate();
    ModelParams params;
    params.config = config;
    Rng rng(seed);
    for (const auto& def : param_defs(config)) {
        Tensor t(def.shape);
        switch (def.kind) {
            case ParamDef::conv_weight: {
                std::size_t fan_in = 1;
                for (std::size_t i = 1; i < def.shape.size(); ++i) fan_in *= def.shape[i];
                const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
                for (double& v : t.data) v = rng.normal() * stddev;
                break;
            }
            case ParamDef::zeros:
                break;
            case ParamDef::ones:
                std::fill(t.data.begin(), t.data.end(), 1.0);
                break;
        }
        params.names.push_back(def.name);
        params.values.push_back(std::move(t));
    }
    return params;
}

ModelParams zero_params(const ArchitectureConfig& config) {
    config.validate();
    ModelParams params;
    params.config = config;
    for (const auto& def : param_defs(config)) {
        Tensor t(def.shape);
        if (def.kind == ParamDef::ones) std::fill(t.data.begin(), t.data.end(), 1.0);
        params.names.push_back(def.name);
        params.values.push_back(std::move(t));
    }
    return params;
}

GradList zero_grads(const ModelParams& params) {
    GradList grads;
    grads.reserve(params.values.size());
    for (const auto& v : params.values) grads.push_back(Tensor::zeros(v.dims));
    return grads;
}

// ---------------------------------------------------------------------------
// Layer primitives

namespace {

struct ConvSpec {
    int sh = 1, sw = 1;  // stride
    int ph = 0, pw = 0;  // zero padding
};

std::size_t conv_extent(std::size_t in, int k, int s, int p) {
    return (in + 2 * static_cast<std::size_t>(p) - static_cast<std::size_t>(k)) /
               static_cast<std::size_t>(s) +
           1;
}

Tensor conv2d(const Tensor& in, const Tensor& w, const Tensor& b, const ConvSpec& s) {
    const std::size_t in_ch = in.dims[0], ih = in.dims[1], iw = in.dims[2];
    const std::size_t out_ch = w.dims[0];
    const std::size_t kh = w.dims[2], kw = w.dims[3];
    if (w.dims[1] != in_ch) throw std::invalid_argument("conv weight/input channel mismatch");
    const std::size_t oh = conv_extent(ih, static_cast<int>(kh), s.sh, s.ph);
    const std::size_t ow = conv_extent(iw, static_cast<int>(kw), s.sw, s.pw);
    Tensor out({out_ch, oh, ow});
    parallel_for(out_ch, 1, [&](std::size_t oc0, std::size_t oc1) {
        for (std::size_t oc = oc0; oc < oc1; ++oc) {
            const double bias = b.data[oc];
            for (std::size_t y = 0; y < oh; ++y) {
                const long y0 = static_cast<long>(y) * s.sh - s.ph;
                for (std::size_t x = 0; x < ow; ++x) {
                    const long x0 = static_cast<long>(x) * s.sw - s.pw;
                    double acc = bias;
                    for (std::size_t ic = 0; ic < in_ch; ++ic) {
                        for (std::size_t i = 0; i < kh; ++i) {
                            const long iy = y0 + static_cast<long>(i);
                            if (iy < 0 || iy >= static_cast<long>(ih)) continue;
                            for (std::size_t j = 0; j < kw; ++j) {
                                const long ix = x0 + static_cast<long>(j);
                                if (ix < 0 || ix >= static_cast<long>(iw)) continue;
                                acc += in.at3(ic, static_cast<std::size_t>(iy),
                                              static_cast<std::size_t>(ix)) *
                                       w.at4(oc, ic, i, j);
                            }
                        }
                    }
                    out.at3(oc, y, x) = acc;
                }
            }
        }
    });
    return out;
}

// Gradients of conv2d: weight/bias grads parallelize over output channels,
// the input grad gathers over input channels — all writes disjoint.
void conv2d_backward(const Tensor& in, const Tensor& w, const ConvSpec& s, const Tensor& g_out,
                     Tensor& g_in, Tensor& g_w, Tensor& g_b) {
    const std::size_t in_ch = in.dims[0], ih = in.dims[1], iw = in.dims[2];
    const std::size_t out_ch = w.dims[0];
    const std::size_t kh = w.dims[2], kw = w.dims[3];
    const std::size_t oh = g_out.dims[1], ow = g_out.dims[2];
    g_in = Tensor::zeros(in.dims);
    g_w = Tensor::zeros(w.dims);
    g_b = Tensor::zeros({out_ch});
    parallel_for(out_ch, 1, [&](std::size_t oc0, std::size_t oc1) {
        for (std::size_t oc = oc0; oc < oc1; ++oc) {
            double bias_acc = 0.0;
            for (std::size_t y = 0; y < oh; ++y) {
                const long y0 = static_cast<long>(y) * s.sh - s.ph;
                for (std::size_t x = 0; x < ow; ++x) {
                    const long x0 = static_cast<long>(x) * s.sw - s.pw;
                    const double g = g_out.at3(oc, y, x);
                    bias_acc += g;
                    for (std::size_t ic = 0; ic < in_ch; ++ic) {
                        for (std::size_t i = 0; i < kh; ++i) {
                            const long iy = y0 + static_cast<long>(i);
                            if (iy < 0 || iy >= static_cast<long>(ih)) continue;
                            for (std::size_t j = 0; j < kw; ++j) {
                                const long ix = x0 + static_cast<long>(j);
                                if (ix < 0 || ix >= static_cast<long>(iw)) continue;
                                g_w.at4(oc, ic, i, j) +=
                                    g * in.at3(ic, static_cast<std::size_t>(iy),
                                               static_cast<std::size_t>(ix));
                            }
                        }
                    }
                }
            }
            g_b.data[oc] = bias_acc;
        }
    });
    parallel_for(in_ch, 1, [&](std::size_t ic0, std::size_t ic1) {
        for (std::size_t ic = ic0; ic < ic1; ++ic) {
            for (std::size_t iy = 0; iy < ih; ++iy) {
                for (std::size_t ix = 0; ix < iw; ++ix) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < kh; ++i) {
                        const long ny = static_cast<long>(iy) + s.ph - static_cast<long>(i);
                        if (ny < 0 || ny % s.sh != 0) continue;
                        const long y = ny / s.sh;
                        if (y >= static_cast<long>(oh)) continue;
                        for (std::size_t j = 0; j < kw; ++j) {
                            const long nx = static_cast<long>(ix) + s.pw - static_cast<long>(j);
                            if (nx < 0 || nx % s.sw != 0) continue;
                            const long x = nx / s.sw;
                            if (x >= static_cast<long>(ow)) continue;
                            for (std::size_t oc = 0; oc < out_ch; ++oc)
                                acc += g_out.at3(oc, static_cast<std::size_t>(y),
                                                 static_cast<std::size_t>(x)) *
                                       w.at4(oc, ic, i, j);
                        }
                    }
                    g_in.at3(ic, iy, ix) = acc;
                }
            }
        }
    });
}

constexpr double kNormEps = 1e-5;

struct NormCache {
    Tensor x_hat;                 // normalized pre-gain values
    std::vector<double> inv_std;  // per channel
};

Tensor instance_norm(const Tensor& in, const Tensor& gain, const Tensor& bias, NormCache* cache) {
    const std::size_t ch = in.dims[0];
    const std::size_t spatial = in.size() / ch;
    Tensor out(in.dims);
    if (cache) {
        cache->x_hat = Tensor(in.dims);
        cache->inv_std.assign(ch, 0.0);
    }
    parallel_for(ch, 1, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            const double* x = in.data.data() + c * spatial;
            double mean = 0.0;
            for (std::size_t i = 0; i < spatial; ++i) mean += x[i];
            mean /= static_cast<double>(spatial);
            double var = 0.0;
            for (std::size_t i = 0; i < spatial; ++i) {
                const double d = x[i] - mean;
                var += d * d;
            }
            var /= static_cast<double>(spatial);
            const double inv_std = 1.0 / std::sqrt(var + kNormEps);
            const double g = gain.data[c];
            const double b = bias.data[c];
            double* o = out.data.data() + c * spatial;
            double* xh = cache ? cache->x_hat.data.data() + c * spatial : nullptr;
            for (std::size_t i = 0; i < spatial; ++i) {
                const double normed = (x[i] - mean) * inv_std;
                if (xh) xh[i] = normed;
                o[i] = g * normed + b;
            }
            if (cache) cache->inv_std[c] = inv_std;
        }
    });
    return out;
}

void instance_norm_backward(const NormCache& cache, const Tensor& gain, const Tensor& g_out,
                            Tensor& g_in, Tensor& g_gain, Tensor& g_bias) {
    const std::size_t ch = g_out.dims[0];
    const std::size_t spatial = g_out.size() / ch;
    g_in = Tensor(g_out.dims);
    g_gain = Tensor::zeros({ch});
    g_bias = Tensor::zeros({ch});
    parallel_for(ch, 1, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            const double* g = g_out.data.data() + c * spatial;
            const double* xh = cache.x_hat.data.data() + c * spatial;
            double sum_g = 0.0, sum_gx = 0.0;
            for (std::size_t i = 0; i < spatial; ++i) {
                sum_g += g[i];
                sum_gx += g[i] * xh[i];
            }
            g_gain.data[c] = sum_gx;
            g_bias.data[c] = sum_g;
            const double inv_n = 1.0 / static_cast<double>(spatial);
            const double scale = gain.data[c] * cache.inv_std[c];
            double* gi = g_in.data.data() + c * spatial;
            for (std::size_t i = 0; i < spatial; ++i)
                gi[i] = scale * (g[i] - sum_g * inv_n - xh[i] * sum_gx * inv_n);
        }
    });
}

Tensor elu(const Tensor& in) {
    Tensor out(in.dims);
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double v = in.data[i];
        out.data[i] = v > 0.0 ? v : std::expm1(v);
    }
    return out;
}

// derivative recoverable from the output alone: 1 above zero, out+1 below
Tensor elu_backward(const Tensor& out, const Tensor& g_out) {
    Tensor g_in(out.dims);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double o = out.data[i];
        g_in.data[i] = g_out.data[i] * (o > 0.0 ? 1.0 : o + 1.0);
    }
    return g_in;
}

Tensor nearest_up2(const Tensor& in) {
    const std::size_t ch = in.dims[0], ih = in.dims[1], iw = in.dims[2];
    Tensor out({ch, ih * 2, iw * 2});
    parallel_for(ch, 1, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c)
            for (std::size_t y = 0; y < ih * 2; ++y)
                for (std::size_t x = 0; x < iw * 2; ++x) out.at3(c, y, x) = in.at3(c, y / 2, x / 2);
    });
    return out;
}

Tensor nearest_up2_backward(const Tensor& g_out, std::size_t ih, std::size_t iw) {
    const std::size_t ch = g_out.dims[0];
    Tensor g_in({ch, ih, iw});
    parallel_for(ch, 1, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            for (std::size_t y = 0; y < ih; ++y) {
                for (std::size_t x = 0; x < iw; ++x) {
                    g_in.at3(c, y, x) = g_out.at3(c, 2 * y, 2 * x) + g_out.at3(c, 2 * y, 2 * x + 1) +
                                        g_out.at3(c, 2 * y + 1, 2 * x) +
                                        g_out.at3(c, 2 * y + 1, 2 * x + 1);
                }
            }
        }
    });
    return g_in;
}

// Keys cubic convolution kernel with a = -0.5
double keys_kernel(double u) {
    const double a = -0.5;
    u = std::abs(u);
    if (u <= 1.0) return (a + 2.0) * u * u * u - (a + 3.0) * u * u + 1.0;
    if (u < 2.0) return a * (u * u * u - 5.0 * u * u + 8.0 * u - 4.0);
    return 0.0;
}

struct AxisWeights {
    std::vector<std::array<std::size_t, 4>> idx;
    std::vector<std::array<double, 4>> wt;
};

AxisWeights bicubic_axis(std::size_t in_n, std::size_t out_n) {
    AxisWeights aw;
    aw.idx.resize(out_n);
    aw.wt.resize(out_n);
    const double scale = static_cast<double>(in_n) / static_cast<double>(out_n);
    for (std::size_t o = 0; o < out_n; ++o) {
        const double src = (static_cast<double>(o) + 0.5) * scale - 0.5;
        const double base = std::floor(src);
        const double t = src - base;
        for (int m = -1; m <= 2; ++m) {
            long p = static_cast<long>(base) + m;
            p = std::clamp(p, 0L, static_cast<long>(in_n) - 1);
            aw.idx[o][m + 1] = static_cast<std::size_t>(p);
            aw.wt[o][m + 1] = keys_kernel(t - static_cast<double>(m));
        }
    }
    return aw;
}

Tensor bicubic_backward(const Tensor& g_out, std::size_t in_rows, std::size_t in_cols) {
    const std::size_t ch = g_out.dims[0], oh = g_out.dims[1], ow = g_out.dims[2];
    const auto rw = bicubic_axis(in_rows, oh);
    const auto cw = bicubic_axis(in_cols, ow);
    Tensor g_in = Tensor::zeros({ch, in_rows, in_cols});
    parallel_for(ch, 1, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t x = 0; x < ow; ++x) {
                    const double g = g_out.at3(c, y, x);
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j)
                            g_in.at3(c, rw.idx[y][i], cw.idx[x][j]) += rw.wt[y][i] * cw.wt[x][j] * g;
                }
            }
        }
    });
    return g_in;
}

}  // namespace

Tensor bicubic_resize(const Tensor& values, std::size_t out_rows, std::size_t out_cols) {
    if (values.ndim() != 3) throw std::invalid_argument("resize expects a 3-d tensor");
    const std::size_t ch = values.dims[0], ih = values.dims[1], iw = values.dims[2];
    if (ih < 2 || iw < 2) throw std::runtime_error("too small to interpolate");
    if (ih == out_rows && iw == out_cols) return values;
    const auto rw = bicubic_axis(ih, out_rows);
    const auto cw = bicubic_axis(iw, out_cols);
    Tensor out({ch, out_rows, out_cols});
    parallel_for(ch, 1, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            for (std::size_t y = 0; y < out_rows; ++y) {
                for (std::size_t x = 0; x < out_cols; ++x) {
                    double acc = 0.0;
                    for (int i = 0; i < 4; ++i) {
                        double row = 0.0;
                        for (int j = 0; j < 4; ++j)
                            row += cw.wt[x][j] * values.at3(c, rw.idx[y][i], cw.idx[x][j]);
                        acc += rw.wt[y][i] * row;
                    }
                    out.at3(c, y, x) = acc;
                }
            }
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Network graph

namespace {

// conv -> instance norm -> elu, with everything the backward pass needs
struct BlockCache {
    Tensor conv_in;
    NormCache norm;
    Tensor out;
};

Tensor block_forward(const Tensor& in, const ModelParams& p, std::size_t base, const ConvSpec& spec,
                     BlockCache* cache) {
    const Tensor& w = p.values[base];
    const Tensor& b = p.values[base + 1];
    const Tensor& gain = p.values[base + 2];
    const Tensor& nbias = p.values[base + 3];
    Tensor z = conv2d(in, w, b, spec);
    Tensor normed = instance_norm(z, gain, nbias, cache ? &cache->norm : nullptr);
    Tensor out = elu(normed);
    if (cache) {
        cache->conv_in = in;
        cache->out = out;
    }
    return out;
}

Tensor block_backward(const Tensor& g_out, const ModelParams& p, std::size_t base,
                      const ConvSpec& spec, const BlockCache& cache, GradList& grads) {
    Tensor g_norm = elu_backward(cache.out, g_out);
    Tensor g_conv, g_gain, g_nbias;
    instance_norm_backward(cache.norm, p.values[base + 2], g_norm, g_conv, g_gain, g_nbias);
    Tensor g_in, g_w, g_b;
    conv2d_backward(cache.conv_in, p.values[base], spec, g_conv, g_in, g_w, g_b);
    for (std::size_t i = 0; i < g_w.size(); ++i) grads[base].data[i] += g_w.data[i];
    for (std::size_t i = 0; i < g_b.size(); ++i) grads[base + 1].data[i] += g_b.data[i];
    for (std::size_t i = 0; i < g_gain.size(); ++i) grads[base + 2].data[i] += g_gain.data[i];
    for (std::size_t i = 0; i < g_nbias.size(); ++i) grads[base + 3].data[i] += g_nbias.data[i];
    return g_in;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    Tensor out({a.dims[0] + b.dims[0], a.dims[1], a.dims[2]});
    std::copy(a.data.begin(), a.data.end(), out.data.begin());
    std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<long>(a.size()));
    return out;
}

void split_channels(const Tensor& g, std::size_t first_ch, Tensor& g_a, Tensor& g_b) {
    const std::size_t h = g.dims[1], w = g.dims[2];
    g_a = Tensor({first_ch, h, w});
    g_b = Tensor({g.dims[0] - first_ch, h, w});
    std::copy(g.data.begin(), g.data.begin() + static_cast<long>(g_a.size()), g_a.data.begin());
    std::copy(g.data.begin() + static_cast<long>(g_a.size()), g.data.end(), g_b.data.begin());
}

struct NetCache {
    std::vector<BlockCache> encoder;
    std::vector<std::size_t> pre_resize_dims;
    Tensor x_eeg;
    BlockCache down0, down1;
    BlockCache up0_conv, up0_fuse, up1_conv, up1_fuse;
    BlockCache dec0, dec1;
    Tensor y_hat;
};

void check_input(const Tensor& x, const ArchitectureConfig& c) {
    if (x.ndim() != 3 || x.dims[0] != static_cast<std::size_t>(c.input_t) ||
        x.dims[1] != static_cast<std::size_t>(c.input_c) ||
        x.dims[2] != static_cast<std::size_t>(c.input_f))
        throw std::runtime_error("input/config mismatch: eeg sample is " + shape_str(x.dims));
}

Tensor encode_impl(const Tensor& x, const ModelParams& p, const Layout& l, NetCache* cache) {
    const auto& c = p.config;
    check_input(x, c);
    Tensor a = x;
    if (cache) cache->encoder.resize(c.encoder_depths.size());
    for (std::size_t i = 0; i < c.encoder_depths.size(); ++i) {
        ConvSpec spec;
        spec.sw = c.encoder_strides[i].second;
        spec.pw = (c.encoder_kernels[i].second - 1) / 2;
        a = block_forward(a, p, l.encoder[i], spec, cache ? &cache->encoder[i] : nullptr);
    }
    if (cache) cache->pre_resize_dims = a.dims;
    Tensor x_eeg = bicubic_resize(a, static_cast<std::size_t>(c.out_w),
                                  static_cast<std::size_t>(c.out_h));
    if (cache) cache->x_eeg = x_eeg;
    return x_eeg;
}

Tensor unet_impl(const Tensor& x_eeg, const ModelParams& p, const Layout& l, NetCache* cache) {
    const auto& c = p.config;
    if (x_eeg.ndim() != 3 || x_eeg.dims[0] != static_cast<std::size_t>(c.feature_depth))
        throw std::runtime_error("input/config mismatch: feature tensor is " +
                                 shape_str(x_eeg.dims));
    if (x_eeg.dims[1] % 4 != 0 || x_eeg.dims[2] % 4 != 0)
        throw std::runtime_error("spatial size not divisible");
    ConvSpec down{2, 2, 1, 1};
    ConvSpec same{1, 1, 1, 1};
    ConvSpec one{1, 1, 0, 0};
    Tensor d0 = block_forward(x_eeg, p, l.down0, down, cache ? &cache->down0 : nullptr);
    Tensor d1 = block_forward(d0, p, l.down1, down, cache ? &cache->down1 : nullptr);
    Tensor u0 = block_forward(nearest_up2(d1), p, l.up0_conv, same,
                              cache ? &cache->up0_conv : nullptr);
    u0 = block_forward(concat_channels(u0, d0), p, l.up0_fuse, one,
                       cache ? &cache->up0_fuse : nullptr);
    Tensor u1 = block_forward(nearest_up2(u0), p, l.up1_conv, same,
                              cache ? &cache->up1_conv : nullptr);
    return block_forward(concat_channels(u1, x_eeg), p, l.up1_fuse, one,
                         cache ? &cache->up1_fuse : nullptr);
}

Tensor decode_impl(const Tensor& x_unet, const ModelParams& p, const Layout& l, NetCache* cache) {
    const auto& c = p.config;
    if (x_unet.ndim() != 3 || x_unet.dims[0] != static_cast<std::size_t>(c.feature_depth) ||
        x_unet.dims[1] != static_cast<std::size_t>(c.out_w) ||
        x_unet.dims[2] != static_cast<std::size_t>(c.out_h))
        throw std::runtime_error("input/config mismatch: feature tensor is " +
                                 shape_str(x_unet.dims));
    ConvSpec same{1, 1, 1, 1};
    Tensor h = block_forward(x_unet, p, l.dec0, same, cache ? &cache->dec0 : nullptr);
    h = block_forward(h, p, l.dec1, same, cache ? &cache->dec1 : nullptr);
    Tensor logits = conv2d(h, p.values[l.dec2], p.values[l.dec2 + 1], same);
    Tensor y_hat(logits.dims);
    for (std::size_t i = 0; i < logits.size(); ++i)
        y_hat.data[i] = 1.0 / (1.0 + std::exp(-logits.data[i]));
    if (cache) cache->y_hat = y_hat;
    return y_hat;
}

Tensor forward_impl(const Tensor& x, const ModelParams& p, NetCache* cache, ForwardTrace* trace) {
    const Layout l = make_layout(p.config);
    NetCache local;
    NetCache* cc = cache ? cache : (trace ? &local : nullptr);
    Tensor x_eeg = encode_impl(x, p, l, cc);
    Tensor x_unet = unet_impl(x_eeg, p, l, cc);
    Tensor y_hat = decode_impl(x_unet, p, l, cc);
    if (trace) {
        trace->encoder_pre_resize_dims = cc->pre_resize_dims;
        trace->unet_innermost_dims = cc->down1.out.dims;
    }
    return y_hat;
}

}  // namespace

Tensor eeg_encode(const Tensor& x, const ModelParams& params) {
    return encode_impl(x, params, make_layout(params.config), nullptr);
}

Tensor unet_forward(const Tensor& x_eeg, const ModelParams& params) {
    return unet_impl(x_eeg, params, make_layout(params.config), nullptr);
}

Tensor fmri_decode(const Tensor& x_unet, const ModelParams& params) {
    return decode_impl(x_unet, params, make_layout(params.config), nullptr);
}

Tensor e2fnet_forward(const Tensor& x, const ModelParams& params) {
    return forward_impl(x, params, nullptr, nullptr);
}

Tensor e2fnet_forward_traced(const Tensor& x, const ModelParams& params, ForwardTrace& trace) {
    return forward_impl(x, params, nullptr, &trace);
}

double e2fnet_backward_accumulate(const Tensor& x, const Tensor& y, const ModelParams& params,
                                  const LossConfig& loss_config, double scale, GradList& grads) {
    const auto& c = params.config;
    const Layout l = make_layout(c);
    NetCache cache;
    Tensor y_hat = forward_impl(x, params, &cache, nullptr);
    if (!all_finite(y_hat)) throw std::runtime_error("numerical overflow");

    Tensor g_yhat;
    const double loss = combined_loss_with_grad(y, y_hat, loss_config, g_yhat);
    if (!std::isfinite(loss)) throw std::runtime_error("numerical overflow");

    GradList local = zero_grads(params);

    // sigmoid
    Tensor g_logits(g_yhat.dims);
    for (std::size_t i = 0; i < g_yhat.size(); ++i) {
        const double s = cache.y_hat.data[i];
        g_logits.data[i] = g_yhat.data[i] * s * (1.0 - s);
    }

    ConvSpec same{1, 1, 1, 1};
    ConvSpec down{2, 2, 1, 1};
    ConvSpec one{1, 1, 0, 0};

    // decoder
    Tensor g_dec1_out, g_w, g_b;
    conv2d_backward(cache.dec1.out, params.values[l.dec2], same, g_logits, g_dec1_out, g_w, g_b);
    for (std::size_t i = 0; i < g_w.size(); ++i) local[l.dec2].data[i] += g_w.data[i];
    for (std::size_t i = 0; i < g_b.size(); ++i) local[l.dec2 + 1].data[i] += g_b.data[i];
    Tensor g_dec0_out = block_backward(g_dec1_out, params, l.dec1, same, cache.dec1, local);
    Tensor g_xunet = block_backward(g_dec0_out, params, l.dec0, same, cache.dec0, local);

    // unet, upper level
    Tensor g_concat1 = block_backward(g_xunet, params, l.up1_fuse, one, cache.up1_fuse, local);
    Tensor g_u1pre, g_xeeg_skip;
    split_channels(g_concat1, static_cast<std::size_t>(c.feature_depth), g_u1pre, g_xeeg_skip);
    Tensor g_t_u1 = block_backward(g_u1pre, params, l.up1_conv, same, cache.up1_conv, local);
    Tensor g_u0 = nearest_up2_backward(g_t_u1, g_t_u1.dims[1] / 2, g_t_u1.dims[2] / 2);

    // unet, lower level
    Tensor g_concat0 = block_backward(g_u0, params, l.up0_fuse, one, cache.up0_fuse, local);
    Tensor g_u0pre, g_d0_skip;
    split_channels(g_concat0, static_cast<std::size_t>(c.feature_depth), g_u0pre, g_d0_skip);
    Tensor g_t_u0 = block_backward(g_u0pre, params, l.up0_conv, same, cache.up0_conv, local);
    Tensor g_d1 = nearest_up2_backward(g_t_u0, g_t_u0.dims[1] / 2, g_t_u0.dims[2] / 2);
    Tensor g_d0 = block_backward(g_d1, params, l.down1, down, cache.down1, local);
    for (std::size_t i = 0; i < g_d0.size(); ++i) g_d0.data[i] += g_d0_skip.data[i];
    Tensor g_xeeg = block_backward(g_d0, params, l.down0, down, cache.down0, local);
    for (std::size_t i = 0; i < g_xeeg.size(); ++i) g_xeeg.data[i] += g_xeeg_skip.data[i];

    // encoder
    Tensor g = bicubic_backward(g_xeeg, cache.pre_resize_dims[1], cache.pre_resize_dims[2]);
    for (std::size_t i = c.encoder_depths.size(); i-- > 0;) {
        ConvSpec spec;
        spec.sw = c.encoder_strides[i].second;
        spec.pw = (c.encoder_kernels[i].second - 1) / 2;
        g = block_backward(g, params, l.encoder[i], spec, cache.encoder[i], local);
    }

    for (std::size_t i = 0; i < grads.size(); ++i)
        for (std::size_t j = 0; j < grads[i].size(); ++j)
            grads[i].data[j] += scale * local[i].data[j];
    return loss;
}

GradList e2fnet_backward(const Tensor& x, const Tensor& y, const ModelParams& params,
                         const LossConfig& loss_config, double* loss_out) {
    GradList grads = zero_grads(params);
    const double loss = e2fnet_backward_accumulate(x, y, params, loss_config, 1.0, grads);
    if (loss_out) *loss_out = loss;
    return grads;
}

}  // namespace e2f

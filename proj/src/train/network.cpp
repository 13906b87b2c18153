#include "ferbench/train/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"
#include "ferbench/simd/kernels.hpp"

namespace ferbench {

namespace {

std::atomic<std::uint64_t> g_augment_count{0};

constexpr char kWeightsMagic[8] = {'F', 'B', 'N', 'E', 'T', '0', '0', '2'};

int conv_out_side(int in_side, const ConvStage& c) {
    return (in_side - c.kernel) / c.stride + 1;  // valid padding
}

// Patch matrix for one sample: rows = in_ch*k*k, columns = out positions.
void im2col(const float* src, int side, int channels, const ConvStage& c,
            float* cols) {
    const int out = conv_out_side(side, c);
    const std::size_t ncols = static_cast<std::size_t>(out) * out;
    std::size_t row = 0;
    for (int ch = 0; ch < channels; ++ch) {
        const float* plane = src + static_cast<std::size_t>(ch) * side * side;
        for (int ky = 0; ky < c.kernel; ++ky) {
            for (int kx = 0; kx < c.kernel; ++kx, ++row) {
                float* dst = cols + row * ncols;
                for (int oy = 0; oy < out; ++oy) {
                    const float* line = plane + (oy * c.stride + ky) * side + kx;
                    for (int ox = 0; ox < out; ++ox)
                        dst[oy * out + ox] = line[ox * c.stride];
                }
            }
        }
    }
}

// Scatter-add of the column gradient back onto the input gradient.
void col2im_add(const float* cols, int side, int channels, const ConvStage& c,
                float* grad) {
    const int out = conv_out_side(side, c);
    const std::size_t ncols = static_cast<std::size_t>(out) * out;
    std::size_t row = 0;
    for (int ch = 0; ch < channels; ++ch) {
        float* plane = grad + static_cast<std::size_t>(ch) * side * side;
        for (int ky = 0; ky < c.kernel; ++ky) {
            for (int kx = 0; kx < c.kernel; ++kx, ++row) {
                const float* src = cols + row * ncols;
                for (int oy = 0; oy < out; ++oy) {
                    float* line = plane + (oy * c.stride + ky) * side + kx;
                    for (int ox = 0; ox < out; ++ox)
                        line[ox * c.stride] += src[oy * out + ox];
                }
            }
        }
    }
}

}  // namespace

const ArchitectureRegistry& ArchitectureRegistry::instance() {
    static ArchitectureRegistry registry;
    return registry;
}

ArchitectureRegistry::ArchitectureRegistry() {
    specs_.push_back({"tiny", 32, 1, {{8, 5, 2}, {16, 3, 2}}, {48}});
    specs_.push_back({"tiny_wide", 32, 1, {{12, 5, 2}, {24, 3, 2}}, {96}});
    // Reduced stand-ins for the two full-scale slots.
    specs_.push_back({"swin_t", 64, 3, {{16, 7, 4}, {32, 3, 2}}, {256}});
    specs_.push_back({"convnext_t", 64, 3, {{24, 7, 4}, {48, 3, 2}}, {192}});
}

const ArchitectureSpec& ArchitectureRegistry::get(const std::string& id) const {
    for (const auto& s : specs_)
        if (s.id == id) return s;
    std::string known;
    for (const auto& s : specs_) known += (known.empty() ? "" : ", ") + s.id;
    throw ContractError("unknown architecture '" + id + "' (available: " + known + ")");
}

bool ArchitectureRegistry::contains(const std::string& id) const {
    for (const auto& s : specs_)
        if (s.id == id) return true;
    return false;
}

std::vector<std::string> ArchitectureRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& s : specs_) out.push_back(s.id);
    return out;
}

std::vector<float> prepare_input(const io::Image& processed, int side, int channels) {
    if (processed.channels != 1)
        throw ContractError("prepare_input: expected a single-channel processed image");
    const std::size_t npix = static_cast<std::size_t>(processed.width) * processed.height;
    std::vector<float> full(npix);
    for (std::size_t i = 0; i < npix; ++i)
        full[i] = static_cast<float>(processed.pixels[i]) / 255.0f;

    std::vector<float> plane(static_cast<std::size_t>(side) * side);
    const float scale = static_cast<float>(processed.width) / static_cast<float>(side);
    const float off = 0.5f * scale - 0.5f;
    const float m[6] = {scale, 0, off, 0, scale, off};
    simd::warp_affine_bilinear(full.data(), processed.width, processed.height,
                               plane.data(), side, side, m);

    if (channels == 1) return plane;
    std::vector<float> out;
    out.reserve(plane.size() * static_cast<std::size_t>(channels));
    for (int c = 0; c < channels; ++c) out.insert(out.end(), plane.begin(), plane.end());
    return out;
}

std::vector<float> augment_plane(const std::vector<float>& plane, int side,
                                 const AugmentationConfig& config, Rng& rng) {
    g_augment_count.fetch_add(1, std::memory_order_relaxed);

    const bool flip = config.horizontal_flip && rng.bernoulli(config.flip_prob);
    const double angle = rng.uniform(-config.rotation_deg, config.rotation_deg) * M_PI / 180.0;
    const double scale = 1.0 / rng.uniform(config.scale_min, config.scale_max);
    const double tx = rng.uniform(-config.translation_frac, config.translation_frac) * side;
    const double ty = rng.uniform(-config.translation_frac, config.translation_frac) * side;

    // Destination -> source affine about the image center.
    const double c = std::cos(angle) * scale;
    const double s = std::sin(angle) * scale;
    const double cx = 0.5 * (side - 1);
    const double cy = 0.5 * (side - 1);
    const double fsgn = flip ? -1.0 : 1.0;
    const float m[6] = {
        static_cast<float>(fsgn * c),
        static_cast<float>(-s),
        static_cast<float>(cx - fsgn * c * cx + s * cy - tx),
        static_cast<float>(fsgn * s),
        static_cast<float>(c),
        static_cast<float>(cy - fsgn * s * cx - c * cy - ty),
    };

    std::vector<float> warped(plane.size());
    simd::warp_affine_bilinear(plane.data(), side, side, warped.data(), side, side, m);

    const float contrast = static_cast<float>(
        1.0 + rng.uniform(-config.contrast, config.contrast));
    const float brightness = static_cast<float>(
        rng.uniform(-config.brightness, config.brightness));
    std::vector<float> out(plane.size());
    simd::scale_bias(warped.data(), out.data(), out.size(), contrast,
                     0.5f - 0.5f * contrast + brightness, 0.0f, 1.0f);
    return out;
}

std::uint64_t augment_apply_count() {
    return g_augment_count.load(std::memory_order_relaxed);
}

Network::Network(const ArchitectureSpec& spec, std::vector<ExpressionLabel> classes,
                 std::uint64_t init_seed)
    : spec_(spec), classes_(std::move(classes)) {
    if (classes_.empty()) throw ContractError("network: empty class list");
    std::sort(classes_.begin(), classes_.end());
    build_layers(init_seed);
}

void Network::build_layers(std::uint64_t init_seed) {
    Rng rng(init_seed);
    auto he_init = [&](std::vector<float>& w, std::size_t fan_in) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
        for (auto& v : w) v = static_cast<float>(rng.uniform(-limit, limit));
    };

    Shape shape{spec_.input_side, spec_.input_channels};
    for (const ConvStage& c : spec_.conv) {
        if (conv_out_side(shape.side, c) < 1)
            throw ContractError("architecture '" + spec_.id + "': conv shrinks below 1px");
        Layer layer;
        layer.is_conv = true;
        layer.conv = c;
        layer.in_shape = shape;
        layer.out_shape = {conv_out_side(shape.side, c), c.out_channels};
        layer.relu = true;
        const std::size_t fan_in =
            static_cast<std::size_t>(shape.channels) * c.kernel * c.kernel;
        layer.w.resize(static_cast<std::size_t>(c.out_channels) * fan_in);
        layer.b.assign(static_cast<std::size_t>(c.out_channels), 0.0f);
        he_init(layer.w, fan_in);
        layer.vw.assign(layer.w.size(), 0.0f);
        layer.vb.assign(layer.b.size(), 0.0f);
        layer.mw.assign(layer.w.size(), 0.0f);
        layer.mb.assign(layer.b.size(), 0.0f);
        shape = layer.out_shape;
        layers_.push_back(std::move(layer));
    }

    std::size_t in = shape.size();
    std::vector<int> widths = spec_.hidden;
    widths.push_back(static_cast<int>(classes_.size()));
    for (std::size_t i = 0; i < widths.size(); ++i) {
        Layer layer;
        layer.is_conv = false;
        layer.in = in;
        layer.out = static_cast<std::size_t>(widths[i]);
        layer.relu = i + 1 < widths.size();
        layer.w.resize(layer.in * layer.out);
        layer.b.assign(layer.out, 0.0f);
        he_init(layer.w, layer.in);
        layer.vw.assign(layer.w.size(), 0.0f);
        layer.vb.assign(layer.out, 0.0f);
        layer.mw.assign(layer.w.size(), 0.0f);
        layer.mb.assign(layer.out, 0.0f);
        in = layer.out;
        layers_.push_back(std::move(layer));
    }
}

std::size_t Network::input_size() const {
    return static_cast<std::size_t>(spec_.input_side) * spec_.input_side *
           spec_.input_channels;
}

std::vector<std::vector<float>> Network::forward(
    const std::vector<float>& centered) const {
    std::vector<std::vector<float>> acts;
    acts.push_back(centered);
    for (const Layer& layer : layers_) {
        const std::vector<float>& x = acts.back();
        std::vector<float> y;
        if (layer.is_conv) {
            const int out = layer.out_shape.side;
            const std::size_t ncols = static_cast<std::size_t>(out) * out;
            const std::size_t k = layer.w.size() /
                                  static_cast<std::size_t>(layer.conv.out_channels);
            std::vector<float> cols(k * ncols);
            im2col(x.data(), layer.in_shape.side, layer.in_shape.channels, layer.conv,
                   cols.data());
            y.resize(static_cast<std::size_t>(layer.conv.out_channels) * ncols);
            for (int ch = 0; ch < layer.conv.out_channels; ++ch)
                std::fill_n(y.data() + static_cast<std::size_t>(ch) * ncols, ncols,
                            layer.b[static_cast<std::size_t>(ch)]);
            simd::gemm_nn(layer.w.data(), cols.data(), y.data(),
                          static_cast<std::size_t>(layer.conv.out_channels), k, ncols);
        } else {
            y = layer.b;
            simd::gemm_nn(x.data(), layer.w.data(), y.data(), 1, layer.in, layer.out);
        }
        if (layer.relu)
            for (auto& v : y) v = std::max(v, 0.0f);
        acts.push_back(std::move(y));
    }
    return acts;
}

std::vector<float> Network::scores(const std::vector<float>& input) const {
    if (input.size() != input_size())
        throw ContractError("network: input size mismatch");
    std::vector<float> centered = input;
    for (auto& v : centered) v -= 0.5f;  // center the 0..1 pixel range
    return forward(centered).back();
}

namespace {

// Softmax cross-entropy over one sample; fills dlogits when given.
double ce_loss(const float* z, std::size_t nc, int y, float weight, float* dlogits) {
    float zmax = z[0];
    for (std::size_t c = 1; c < nc; ++c) zmax = std::max(zmax, z[c]);
    double denom = 0;
    for (std::size_t c = 0; c < nc; ++c) denom += std::exp(static_cast<double>(z[c] - zmax));
    const double logp = static_cast<double>(z[y] - zmax) - std::log(denom);
    if (dlogits) {
        for (std::size_t c = 0; c < nc; ++c) {
            const double p = std::exp(static_cast<double>(z[c] - zmax)) / denom;
            dlogits[c] = static_cast<float>(
                weight * (p - (static_cast<int>(c) == y ? 1.0 : 0.0)));
        }
    }
    return -static_cast<double>(weight) * logp;
}

}  // namespace

double Network::loss_only(const std::vector<std::vector<float>>& inputs,
                          const std::vector<int>& class_indices,
                          const std::vector<float>& sample_weights) const {
    double weight_sum = 0;
    for (float w : sample_weights) weight_sum += w;
    double loss = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto s = scores(inputs[i]);
        loss += ce_loss(s.data(), classes_.size(), class_indices[i],
                        sample_weights[i], nullptr);
    }
    return loss / weight_sum;
}

double Network::train_batch(const std::vector<std::vector<float>>& inputs,
                            const std::vector<int>& class_indices,
                            const std::vector<float>& sample_weights,
                            double learning_rate, const std::string& optimizer,
                            double momentum) {
    const bool adam = optimizer == "adam";
    if (!adam && optimizer != "sgd")
        throw ContractError("train_batch: unknown optimizer '" + optimizer + "'");
    const std::size_t batch = inputs.size();
    if (batch == 0 || class_indices.size() != batch || sample_weights.size() != batch)
        throw ContractError("train_batch: inconsistent batch arrays");
    ++step_;

    double weight_sum = 0;
    for (float w : sample_weights) weight_sum += w;
    if (weight_sum <= 0) throw ContractError("train_batch: non-positive weight sum");

    // Gradient accumulators across the batch.
    std::vector<std::vector<float>> dw(layers_.size());
    std::vector<std::vector<float>> db(layers_.size());
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        dw[li].assign(layers_[li].w.size(), 0.0f);
        db[li].assign(layers_[li].b.size(), 0.0f);
    }

    const std::size_t nc = classes_.size();
    double loss = 0;
    for (std::size_t i = 0; i < batch; ++i) {
        if (inputs[i].size() != input_size())
            throw ContractError("train_batch: input size mismatch");
        std::vector<float> centered = inputs[i];
        for (auto& v : centered) v -= 0.5f;
        const auto acts = forward(centered);

        std::vector<float> delta(nc);
        loss += ce_loss(acts.back().data(), nc, class_indices[i], sample_weights[i],
                        delta.data());

        for (std::size_t li = layers_.size(); li-- > 0;) {
            const Layer& layer = layers_[li];
            const std::vector<float>& x = acts[li];
            if (layer.relu) {
                // delta arrives w.r.t. the post-relu output; gate it.
                const std::vector<float>& y = acts[li + 1];
                for (std::size_t j = 0; j < delta.size(); ++j)
                    if (y[j] <= 0.0f) delta[j] = 0.0f;
            }
            std::vector<float> prev;
            if (layer.is_conv) {
                const int out = layer.out_shape.side;
                const std::size_t ncols = static_cast<std::size_t>(out) * out;
                const std::size_t k = layer.w.size() /
                                      static_cast<std::size_t>(layer.conv.out_channels);
                std::vector<float> cols(k * ncols);
                im2col(x.data(), layer.in_shape.side, layer.in_shape.channels,
                       layer.conv, cols.data());
                // dW(oc x k) += delta(oc x ncols) * cols(k x ncols)^T
                simd::gemm_nt(delta.data(), cols.data(), dw[li].data(),
                              static_cast<std::size_t>(layer.conv.out_channels), ncols, k);
                for (int ch = 0; ch < layer.conv.out_channels; ++ch) {
                    const float* d = delta.data() + static_cast<std::size_t>(ch) * ncols;
                    float acc = 0;
                    for (std::size_t p = 0; p < ncols; ++p) acc += d[p];
                    db[li][static_cast<std::size_t>(ch)] += acc;
                }
                if (li > 0) {
                    // dcols(k x ncols) = W(oc x k)^T * delta(oc x ncols)
                    std::vector<float> dcols(k * ncols, 0.0f);
                    simd::gemm_tn(layer.w.data(), delta.data(), dcols.data(),
                                  static_cast<std::size_t>(layer.conv.out_channels), k,
                                  ncols);
                    prev.assign(x.size(), 0.0f);
                    col2im_add(dcols.data(), layer.in_shape.side,
                               layer.in_shape.channels, layer.conv, prev.data());
                }
            } else {
                simd::gemm_tn(x.data(), delta.data(), dw[li].data(), 1, layer.in,
                              layer.out);
                simd::axpy(1.0f, delta.data(), db[li].data(), layer.out);
                if (li > 0) {
                    prev.assign(layer.in, 0.0f);
                    simd::gemm_nt(delta.data(), layer.w.data(), prev.data(), 1,
                                  layer.out, layer.in);
                }
            }
            delta = std::move(prev);
        }
    }
    loss /= weight_sum;

    const float inv = static_cast<float>(1.0 / weight_sum);
    const float lr = static_cast<float>(learning_rate);
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        Layer& layer = layers_[li];
        for (auto& g : dw[li]) g *= inv;
        for (auto& g : db[li]) g *= inv;
        if (adam) {
            constexpr float beta1 = 0.9f, beta2 = 0.999f, eps = 1e-8f;
            const float bias1 = 1.0f - std::pow(beta1, static_cast<float>(step_));
            const float bias2 = 1.0f - std::pow(beta2, static_cast<float>(step_));
            auto update = [&](std::vector<float>& w, std::vector<float>& m,
                              std::vector<float>& v, const std::vector<float>& g) {
                for (std::size_t i = 0; i < w.size(); ++i) {
                    m[i] = beta1 * m[i] + (1.0f - beta1) * g[i];
                    v[i] = beta2 * v[i] + (1.0f - beta2) * g[i] * g[i];
                    w[i] -= lr * (m[i] / bias1) / (std::sqrt(v[i] / bias2) + eps);
                }
            };
            update(layer.w, layer.mw, layer.vw, dw[li]);
            update(layer.b, layer.mb, layer.vb, db[li]);
        } else {
            const float mu = static_cast<float>(momentum);
            for (std::size_t i = 0; i < layer.w.size(); ++i) {
                layer.vw[i] = mu * layer.vw[i] - lr * dw[li][i];
                layer.w[i] += layer.vw[i];
            }
            for (std::size_t i = 0; i < layer.b.size(); ++i) {
                layer.vb[i] = mu * layer.vb[i] - lr * db[li][i];
                layer.b[i] += layer.vb[i];
            }
        }
    }
    return loss;
}

std::vector<float> Network::snapshot_weights() const {
    std::vector<float> out;
    for (const auto& layer : layers_) {
        out.insert(out.end(), layer.w.begin(), layer.w.end());
        out.insert(out.end(), layer.b.begin(), layer.b.end());
    }
    return out;
}

void Network::restore_weights(const std::vector<float>& snapshot) {
    std::size_t pos = 0;
    for (auto& layer : layers_) {
        if (pos + layer.w.size() + layer.b.size() > snapshot.size())
            throw ContractError("restore_weights: snapshot size mismatch");
        std::copy_n(snapshot.data() + pos, layer.w.size(), layer.w.data());
        pos += layer.w.size();
        std::copy_n(snapshot.data() + pos, layer.b.size(), layer.b.data());
        pos += layer.b.size();
    }
    if (pos != snapshot.size())
        throw ContractError("restore_weights: snapshot size mismatch");
}

void Network::save(const std::filesystem::path& path) const {
    std::string blob(kWeightsMagic, sizeof(kWeightsMagic));
    auto put_u32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) blob.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    };
    auto put_floats = [&](const std::vector<float>& v) {
        const char* p = reinterpret_cast<const char*>(v.data());
        blob.append(p, p + v.size() * sizeof(float));
    };

    put_u32(static_cast<std::uint32_t>(spec_.id.size()));
    blob += spec_.id;
    put_u32(static_cast<std::uint32_t>(spec_.input_side));
    put_u32(static_cast<std::uint32_t>(spec_.input_channels));
    put_u32(static_cast<std::uint32_t>(spec_.conv.size()));
    for (const auto& c : spec_.conv) {
        put_u32(static_cast<std::uint32_t>(c.out_channels));
        put_u32(static_cast<std::uint32_t>(c.kernel));
        put_u32(static_cast<std::uint32_t>(c.stride));
    }
    put_u32(static_cast<std::uint32_t>(spec_.hidden.size()));
    for (int h : spec_.hidden) put_u32(static_cast<std::uint32_t>(h));
    put_u32(static_cast<std::uint32_t>(classes_.size()));
    for (ExpressionLabel c : classes_) put_u32(static_cast<std::uint32_t>(c));
    for (const auto& layer : layers_) {
        put_floats(layer.w);
        put_floats(layer.b);
    }
    io::atomic_write(path, blob);
}

Network Network::load(const std::filesystem::path& path) {
    const std::string blob = io::read_text(path);
    if (blob.size() < sizeof(kWeightsMagic) ||
        std::memcmp(blob.data(), kWeightsMagic, sizeof(kWeightsMagic)) != 0)
        throw DataError("model weights: bad magic in " + path.string());

    std::size_t pos = sizeof(kWeightsMagic);
    auto get_u32 = [&]() -> std::uint32_t {
        if (pos + 4 > blob.size()) throw DataError("model weights: truncated " + path.string());
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(blob[pos++])) << (8 * i);
        return v;
    };

    ArchitectureSpec spec;
    const std::uint32_t id_len = get_u32();
    if (pos + id_len > blob.size())
        throw DataError("model weights: truncated " + path.string());
    spec.id = blob.substr(pos, id_len);
    pos += id_len;
    spec.input_side = static_cast<int>(get_u32());
    spec.input_channels = static_cast<int>(get_u32());
    const std::uint32_t nconv = get_u32();
    for (std::uint32_t i = 0; i < nconv; ++i) {
        ConvStage c;
        c.out_channels = static_cast<int>(get_u32());
        c.kernel = static_cast<int>(get_u32());
        c.stride = static_cast<int>(get_u32());
        spec.conv.push_back(c);
    }
    const std::uint32_t nh = get_u32();
    for (std::uint32_t i = 0; i < nh; ++i) spec.hidden.push_back(static_cast<int>(get_u32()));
    const std::uint32_t nc = get_u32();
    std::vector<ExpressionLabel> classes;
    for (std::uint32_t i = 0; i < nc; ++i)
        classes.push_back(static_cast<ExpressionLabel>(get_u32()));

    Network net(spec, classes, 0);
    for (auto& layer : net.layers_) {
        const std::size_t bytes = (layer.w.size() + layer.b.size()) * sizeof(float);
        if (pos + bytes > blob.size())
            throw DataError("model weights: truncated " + path.string());
        std::memcpy(layer.w.data(), blob.data() + pos, layer.w.size() * sizeof(float));
        pos += layer.w.size() * sizeof(float);
        std::memcpy(layer.b.data(), blob.data() + pos, layer.b.size() * sizeof(float));
        pos += layer.b.size() * sizeof(float);
    }
    return net;
}

}  // namespace ferbench

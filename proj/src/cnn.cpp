#include "avdb/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "avdb/error.hpp"
#include "avdb/rng.hpp"

namespace avdb {

namespace {
constexpr double kProbFloor = 1e-12;
}

Tensor3 conv2d_forward(const Tensor3& x, const ConvLayer& layer) {
    if (x.channels != layer.in_channels)
        raise(ErrorCode::ChannelMismatch,
              "conv expects " + std::to_string(layer.in_channels) + " channels, got " +
                  std::to_string(x.channels));
    const int h = x.height, w = x.width, k = layer.ksize, r = k / 2;
    Tensor3 out = Tensor3::zeros(layer.out_channels, h, w);

    for (int o = 0; o < layer.out_channels; ++o) {
        double* plane = &out.at(o, 0, 0);
        std::fill(plane, plane + static_cast<std::size_t>(h) * w, layer.bias[o]);
        for (int c = 0; c < layer.in_channels; ++c) {
            for (int ky = 0; ky < k; ++ky) {
                const int dy = ky - r;
                const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
                for (int kx = 0; kx < k; ++kx) {
                    const int dx = kx - r;
                    const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
                    const double wv = layer.kernel(o, c, ky, kx);
                    for (int y = y0; y < y1; ++y) {
                        const double* src = &x.at(c, y + dy, x0 + dx);
                        double* dst = &out.at(o, y, x0);
                        for (int i = 0; i < x1 - x0; ++i) dst[i] += wv * src[i];
                    }
                }
            }
        }
    }
    return out;
}

std::pair<Tensor3, std::vector<std::size_t>> maxpool2x2(const Tensor3& x) {
    if (x.height % 2 != 0 || x.width % 2 != 0)
        raise(ErrorCode::OddDims, "maxpool2x2 needs even spatial dims");
    const int oh = x.height / 2, ow = x.width / 2;
    Tensor3 out = Tensor3::zeros(x.channels, oh, ow);
    std::vector<std::size_t> argmax(out.size());
    std::size_t oi = 0;
    for (int c = 0; c < x.channels; ++c) {
        for (int y = 0; y < oh; ++y) {
            for (int xx = 0; xx < ow; ++xx, ++oi) {
                std::size_t base =
                    (static_cast<std::size_t>(c) * x.height + 2 * y) * x.width + 2 * xx;
                std::size_t best = base;
                double best_v = x.values[base];
                const std::size_t cand[3] = {base + 1, base + x.width,
                                             base + x.width + 1};
                for (std::size_t idx : cand) {
                    if (x.values[idx] > best_v) {
                        best_v = x.values[idx];
                        best = idx;
                    }
                }
                out.values[oi] = best_v;
                argmax[oi] = best;
            }
        }
    }
    return {std::move(out), std::move(argmax)};
}

Tensor3 relu(const Tensor3& x) {
    Tensor3 out = x;
    for (double& v : out.values) v = v > 0.0 ? v : 0.0;
    return out;
}

std::vector<double> relu(const std::vector<double>& x) {
    std::vector<double> out = x;
    for (double& v : out) v = v > 0.0 ? v : 0.0;
    return out;
}

std::vector<double> fc_forward(const std::vector<double>& x, const FcLayer& layer) {
    if (x.size() != static_cast<std::size_t>(layer.in_dim))
        raise(ErrorCode::DimMismatch, "fc input dim " + std::to_string(x.size()) +
                                          " != " + std::to_string(layer.in_dim));
    std::vector<double> out(layer.out_dim);
    for (int o = 0; o < layer.out_dim; ++o) {
        const double* w = &layer.weights[static_cast<std::size_t>(o) * layer.in_dim];
        double acc = layer.bias[o];
        for (int i = 0; i < layer.in_dim; ++i) acc += w[i] * x[i];
        out[o] = acc;
    }
    return out;
}

std::vector<double> softmax(const std::vector<double>& z) {
    if (z.empty()) raise(ErrorCode::EmptyInput, "softmax of empty vector");
    double zmax = *std::max_element(z.begin(), z.end());
    std::vector<double> out(z.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp(z[i] - zmax);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

double cross_entropy(const std::vector<double>& p, int target) {
    if (target < 0 || static_cast<std::size_t>(target) >= p.size())
        raise(ErrorCode::BadTarget, "target index " + std::to_string(target));
    return -std::log(std::max(p[static_cast<std::size_t>(target)], kProbFloor));
}

CnnModel make_cnn(int input_size, const std::vector<int>& conv_channels, int fc_hidden,
                  std::uint64_t seed) {
    if (conv_channels.empty() || fc_hidden < 1 || input_size < 1)
        raise(ErrorCode::InvalidArgument, "bad cnn architecture");
    const int depth = static_cast<int>(conv_channels.size());
    if (input_size % (1 << depth) != 0)
        raise(ErrorCode::SizeMismatch,
              "input size " + std::to_string(input_size) + " not divisible by 2^" +
                  std::to_string(depth));

    Rng rng(seed);
    auto he_fill = [&rng](std::vector<double>& v, int fan_in) {
        double stddev = std::sqrt(2.0 / fan_in);
        for (double& x : v) x = stddev * rng.next_gaussian();
    };

    CnnModel m;
    m.input_size = input_size;
    int in_ch = 1;
    for (int out_ch : conv_channels) {
        if (out_ch < 1) raise(ErrorCode::InvalidArgument, "conv channels must be >= 1");
        ConvLayer layer;
        layer.in_channels = in_ch;
        layer.out_channels = out_ch;
        layer.ksize = 3;
        layer.kernels.resize(static_cast<std::size_t>(out_ch) * in_ch * 9);
        layer.bias.assign(out_ch, 0.0);
        he_fill(layer.kernels, in_ch * 9);
        m.conv.push_back(std::move(layer));
        in_ch = out_ch;
    }
    const int side = input_size >> depth;
    const int flat = conv_channels.back() * side * side;
    m.fc1.in_dim = flat;
    m.fc1.out_dim = fc_hidden;
    m.fc1.weights.resize(static_cast<std::size_t>(fc_hidden) * flat);
    m.fc1.bias.assign(fc_hidden, 0.0);
    he_fill(m.fc1.weights, flat);
    m.fc2.in_dim = fc_hidden;
    m.fc2.out_dim = 2;
    m.fc2.weights.resize(static_cast<std::size_t>(2) * fc_hidden);
    m.fc2.bias.assign(2, 0.0);
    he_fill(m.fc2.weights, fc_hidden);
    return m;
}

std::pair<std::vector<double>, ForwardCache> cnn_forward(const CnnModel& m,
                                                         const GrayTensor& x) {
    if (x.width != m.input_size || x.height != m.input_size)
        raise(ErrorCode::SizeMismatch,
              "input " + std::to_string(x.width) + "x" + std::to_string(x.height) +
                  " != model input size " + std::to_string(m.input_size));

    ForwardCache cache;
    Tensor3 cur{1, x.height, x.width, x.values};
    for (const auto& layer : m.conv) {
        cache.stage_in.push_back(cur);
        Tensor3 z = conv2d_forward(cur, layer);
        Tensor3 a = relu(z);
        auto [pooled, argmax] = maxpool2x2(a);
        cache.conv_z.push_back(std::move(z));
        cache.conv_a.push_back(std::move(a));
        cache.pool_argmax.push_back(std::move(argmax));
        cur = std::move(pooled);
    }
    cache.pooled_last = cur;
    cache.fc1_z = fc_forward(cur.values, m.fc1);
    cache.fc1_a = relu(cache.fc1_z);
    cache.logits = fc_forward(cache.fc1_a, m.fc2);
    cache.probs = softmax(cache.logits);
    return {cache.probs, std::move(cache)};
}

namespace {

CnnGradients zero_gradients(const CnnModel& m) {
    CnnGradients g;
    for (const auto& layer : m.conv) {
        ConvLayer z = layer;
        std::fill(z.kernels.begin(), z.kernels.end(), 0.0);
        std::fill(z.bias.begin(), z.bias.end(), 0.0);
        g.conv.push_back(std::move(z));
    }
    g.fc1 = m.fc1;
    std::fill(g.fc1.weights.begin(), g.fc1.weights.end(), 0.0);
    std::fill(g.fc1.bias.begin(), g.fc1.bias.end(), 0.0);
    g.fc2 = m.fc2;
    std::fill(g.fc2.weights.begin(), g.fc2.weights.end(), 0.0);
    std::fill(g.fc2.bias.begin(), g.fc2.bias.end(), 0.0);
    return g;
}

// d(in) and d(kernels)/d(bias) for one conv layer, given d(out) = dz.
void conv2d_backward(const Tensor3& in, const ConvLayer& layer, const Tensor3& dz,
                     ConvLayer& grad, Tensor3& din) {
    const int h = in.height, w = in.width, k = layer.ksize, r = k / 2;
    for (int o = 0; o < layer.out_channels; ++o) {
        const double* dzp = &dz.at(o, 0, 0);
        double acc = 0.0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(h) * w; ++i) acc += dzp[i];
        grad.bias[o] += acc;

        for (int c = 0; c < layer.in_channels; ++c) {
            for (int ky = 0; ky < k; ++ky) {
                const int dy = ky - r;
                const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
                for (int kx = 0; kx < k; ++kx) {
                    const int dx = kx - r;
                    const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
                    const double wv = layer.kernel(o, c, ky, kx);
                    double ksum = 0.0;
                    for (int y = y0; y < y1; ++y) {
                        const double* src = &in.at(c, y + dy, x0 + dx);
                        const double* dzr = &dz.at(o, y, x0);
                        double* dinr = &din.at(c, y + dy, x0 + dx);
                        for (int i = 0; i < x1 - x0; ++i) {
                            ksum += dzr[i] * src[i];
                            dinr[i] += wv * dzr[i];
                        }
                    }
                    grad.kernels[((static_cast<std::size_t>(o) * layer.in_channels + c) *
                                      k +
                                  ky) *
                                     k +
                                 kx] += ksum;
                }
            }
        }
    }
}

}  // namespace

CnnGradients cnn_backward(const CnnModel& m, const ForwardCache& cache, int target) {
    if (target != 0 && target != 1)
        raise(ErrorCode::BadTarget, "target must be 0 or 1");
    CnnGradients g = zero_gradients(m);

    // Softmax + cross-entropy head: d(logits) = p - onehot.
    std::vector<double> dlogits = cache.probs;
    dlogits[static_cast<std::size_t>(target)] -= 1.0;

    for (int o = 0; o < m.fc2.out_dim; ++o) {
        g.fc2.bias[o] = dlogits[o];
        double* gw = &g.fc2.weights[static_cast<std::size_t>(o) * m.fc2.in_dim];
        for (int i = 0; i < m.fc2.in_dim; ++i) gw[i] = dlogits[o] * cache.fc1_a[i];
    }
    std::vector<double> dfc1_a(m.fc2.in_dim, 0.0);
    for (int o = 0; o < m.fc2.out_dim; ++o) {
        const double* w = &m.fc2.weights[static_cast<std::size_t>(o) * m.fc2.in_dim];
        for (int i = 0; i < m.fc2.in_dim; ++i) dfc1_a[i] += w[i] * dlogits[o];
    }
    std::vector<double> dfc1_z(dfc1_a.size());
    for (std::size_t i = 0; i < dfc1_a.size(); ++i)
        dfc1_z[i] = cache.fc1_z[i] > 0.0 ? dfc1_a[i] : 0.0;

    for (int o = 0; o < m.fc1.out_dim; ++o) {
        g.fc1.bias[o] = dfc1_z[o];
        double* gw = &g.fc1.weights[static_cast<std::size_t>(o) * m.fc1.in_dim];
        const double* in = cache.pooled_last.values.data();
        for (int i = 0; i < m.fc1.in_dim; ++i) gw[i] = dfc1_z[o] * in[i];
    }
    std::vector<double> dflat(m.fc1.in_dim, 0.0);
    for (int o = 0; o < m.fc1.out_dim; ++o) {
        const double* w = &m.fc1.weights[static_cast<std::size_t>(o) * m.fc1.in_dim];
        for (int i = 0; i < m.fc1.in_dim; ++i) dflat[i] += w[i] * dfc1_z[o];
    }

    // Walk the conv stages backwards: unpool to argmax, mask by relu, then
    // conv backward into the previous stage's pooled gradient.
    Tensor3 dpooled{cache.pooled_last.channels, cache.pooled_last.height,
                    cache.pooled_last.width, std::move(dflat)};
    for (int s = m.depth() - 1; s >= 0; --s) {
        const Tensor3& a = cache.conv_a[static_cast<std::size_t>(s)];
        Tensor3 da = Tensor3::zeros(a.channels, a.height, a.width);
        const auto& argmax = cache.pool_argmax[static_cast<std::size_t>(s)];
        for (std::size_t i = 0; i < argmax.size(); ++i)
            da.values[argmax[i]] += dpooled.values[i];

        const Tensor3& z = cache.conv_z[static_cast<std::size_t>(s)];
        for (std::size_t i = 0; i < da.values.size(); ++i)
            if (z.values[i] <= 0.0) da.values[i] = 0.0;

        const Tensor3& in = cache.stage_in[static_cast<std::size_t>(s)];
        Tensor3 din = Tensor3::zeros(in.channels, in.height, in.width);
        conv2d_backward(in, m.conv[static_cast<std::size_t>(s)], da,
                        g.conv[static_cast<std::size_t>(s)], din);
        dpooled = std::move(din);
    }
    return g;
}

CnnGradients cnn_gradients(const CnnModel& m, const GrayTensor& x, int target) {
    auto [probs, cache] = cnn_forward(m, x);
    (void)probs;
    return cnn_backward(m, cache, target);
}

Label cnn_predict(const CnnModel& m, const GrayTensor& x) {
    auto [probs, cache] = cnn_forward(m, x);
    (void)cache;
    return probs[0] >= probs[1] ? Label::Drone : Label::Bird;
}

std::vector<int> default_conv_channels(int depth) {
    switch (depth) {
        case 2: return {8, 16};
        case 3: return {8, 16, 32};
        case 4: return {8, 16, 32, 64};
        default:
            raise(ErrorCode::InvalidArgument,
                  "conv depth must be 2, 3 or 4, got " + std::to_string(depth));
    }
}

std::pair<CnnModel, std::vector<EpochStats>> cnn_train(const Dataset& ds,
                                                       const CnnTrainConfig& cfg) {
    if (ds.samples.empty()) raise(ErrorCode::EmptyDataset, "cnn needs training data");
    if (ds.count(Label::Drone) == 0 || ds.count(Label::Bird) == 0)
        raise(ErrorCode::SingleClassDataset, "cnn training needs both classes");
    if (cfg.epochs < 1 || cfg.batch < 1 || !(cfg.lr > 0.0) || cfg.momentum < 0.0)
        raise(ErrorCode::InvalidArgument, "cnn config values must be positive");
    if (cfg.conv_channels.size() < 2 || cfg.conv_channels.size() > 4)
        raise(ErrorCode::InvalidArgument, "conv depth must be 2, 3 or 4");

    const int size = static_cast<int>(std::lround(std::sqrt(
        static_cast<double>(ds.feature_dim))));
    if (static_cast<std::size_t>(size) * size != ds.feature_dim)
        raise(ErrorCode::SizeMismatch, "cnn needs square raw-pixel features");

    CnnModel model = make_cnn(size, cfg.conv_channels, cfg.fc_hidden, cfg.seed);
    CnnGradients vel = zero_gradients(model);

    const std::size_t n = ds.samples.size();
    Rng rng(mix_seed(cfg.seed, 0x7261696e));  // separate stream from the init
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<EpochStats> log;
    int flat_epochs = 0;
    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t correct = 0;

        for (std::size_t start = 0; start < n; start += cfg.batch) {
            std::size_t bsz = std::min<std::size_t>(cfg.batch, n - start);
            CnnGradients acc = zero_gradients(model);
            for (std::size_t bi = 0; bi < bsz; ++bi) {
                const auto& s = ds.samples[order[start + bi]];
                GrayTensor t = features_as_tensor(s.features, size);
                auto [probs, cache] = cnn_forward(model, t);
                int target = class_index(s.label);
                loss_sum += cross_entropy(probs, target);
                if (label_from_index(probs[0] >= probs[1] ? 0 : 1) == s.label) ++correct;
                CnnGradients g = cnn_backward(model, cache, target);
                std::vector<const std::vector<double>*> parts;
                visit_params(g, [&parts](const std::string&, const std::vector<double>& v) {
                    parts.push_back(&v);
                });
                std::size_t slot = 0;
                visit_params(acc, [&](const std::string&, std::vector<double>& dst) {
                    const std::vector<double>& src = *parts[slot++];
                    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
                });
            }
            const double scale = 1.0 / static_cast<double>(bsz);
            std::vector<std::vector<double>*> vparts, gparts;
            visit_params(vel, [&vparts](const std::string&, std::vector<double>& v) {
                vparts.push_back(&v);
            });
            visit_params(acc, [&gparts](const std::string&, std::vector<double>& v) {
                gparts.push_back(&v);
            });
            std::size_t slot = 0;
            visit_params(model, [&](const std::string&, std::vector<double>& param) {
                std::vector<double>& v = *vparts[slot];
                const std::vector<double>& grad = *gparts[slot];
                ++slot;
                for (std::size_t i = 0; i < param.size(); ++i) {
                    v[i] = cfg.momentum * v[i] - cfg.lr * grad[i] * scale;
                    param[i] += v[i];
                }
            });
        }

        EpochStats stats{loss_sum / static_cast<double>(n),
                         static_cast<double>(correct) / static_cast<double>(n)};
        log.push_back(stats);
        if (log.size() >= 2) {
            double delta = std::abs(log[log.size() - 1].mean_loss -
                                    log[log.size() - 2].mean_loss);
            flat_epochs = delta < 1e-5 ? flat_epochs + 1 : 0;
            if (flat_epochs >= 5) break;
        }
    }
    return {std::move(model), std::move(log)};
}

GradCheckResult compare_to_numeric(CnnModel& m, const GrayTensor& x, int target,
                                   double h, const CnnGradients& grads) {
    GradCheckResult result;
    auto loss_at = [&m, &x, target]() {
        auto [probs, cache] = cnn_forward(m, x);
        (void)cache;
        return cross_entropy(probs, target);
    };

    const CnnGradients* gp = &grads;
    std::vector<std::pair<std::string, const std::vector<double>*>> gvecs;
    visit_params(*gp, [&gvecs](const std::string& name, const std::vector<double>& v) {
        gvecs.emplace_back(name, &v);
    });
    std::size_t slot = 0;
    visit_params(m, [&](const std::string& name, std::vector<double>& params) {
        const std::vector<double>& analytic = *gvecs[slot++].second;
        for (std::size_t i = 0; i < params.size(); ++i) {
            double saved = params[i];
            params[i] = saved + h;
            double lp = loss_at();
            params[i] = saved - h;
            double lm = loss_at();
            params[i] = saved;
            double numeric = (lp - lm) / (2.0 * h);
            double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-4});
            double rel = std::abs(analytic[i] - numeric) / denom;
            if (rel > result.max_rel_err) {
                result.max_rel_err = rel;
                result.worst_param = name + "[" + std::to_string(i) + "]";
                result.analytic = analytic[i];
                result.numeric = numeric;
            }
        }
    });
    return result;
}

GradCheckResult gradient_check(CnnModel& m, const GrayTensor& x, int target, double h) {
    CnnGradients grads = cnn_gradients(m, x, target);
    return compare_to_numeric(m, x, target, h, grads);
}

GradCheckResult reference_gradient_check() {
    CnnModel m = make_cnn(8, {2}, 4, 20240601);
    Rng rng(77);
    GrayTensor x;
    x.width = x.height = 8;
    x.values.resize(64);
    for (double& v : x.values) v = rng.next_double();
    return gradient_check(m, x, 0, 1e-5);
}

}  // namespace avdb

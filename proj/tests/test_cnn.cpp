#include <doctest.h>

#include <cmath>
#include <random>

#include "avdb/cnn.hpp"
#include "avdb/error.hpp"
#include "avdb/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace avdb;
using namespace avdb::test;

namespace {

Tensor3 random_t3(std::mt19937& gen, int c, int h, int w) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Tensor3 t = Tensor3::zeros(c, h, w);
    for (auto& v : t.values) v = d(gen);
    return t;
}

ConvLayer random_conv(std::mt19937& gen, int in_ch, int out_ch, int k) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    ConvLayer l;
    l.in_channels = in_ch;
    l.out_channels = out_ch;
    l.ksize = k;
    l.kernels.resize(static_cast<std::size_t>(out_ch) * in_ch * k * k);
    l.bias.resize(out_ch);
    for (auto& v : l.kernels) v = d(gen);
    for (auto& v : l.bias) v = d(gen);
    return l;
}

FcLayer random_fc(std::mt19937& gen, int in_dim, int out_dim) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    FcLayer l;
    l.in_dim = in_dim;
    l.out_dim = out_dim;
    l.weights.resize(static_cast<std::size_t>(out_dim) * in_dim);
    l.bias.resize(out_dim);
    for (auto& v : l.weights) v = d(gen);
    for (auto& v : l.bias) v = d(gen);
    return l;
}

Dataset tiny_image_dataset(std::uint32_t per_class, int size, std::uint64_t seed) {
    return generate_synthetic(per_class, size, seed, FeatureMode::RawPixels);
}

}  // namespace

TEST_CASE("conv with a 1x1 identity kernel reproduces the input") {
    Tensor3 x = Tensor3::zeros(1, 3, 3);
    std::fill(x.values.begin(), x.values.end(), 1.0);
    ConvLayer l;
    l.in_channels = 1;
    l.out_channels = 1;
    l.ksize = 1;
    l.kernels = {1.0};
    l.bias = {0.0};
    CHECK(conv2d_forward(x, l).values == x.values);
}

TEST_CASE("conv 3x3 all-ones kernel counts the zero-padded overlap") {
    Tensor3 x = Tensor3::zeros(1, 3, 3);
    std::fill(x.values.begin(), x.values.end(), 1.0);
    ConvLayer l;
    l.in_channels = 1;
    l.out_channels = 1;
    l.ksize = 3;
    l.kernels.assign(9, 1.0);
    l.bias = {0.0};
    Tensor3 out = conv2d_forward(x, l);
    CHECK(out.values == std::vector<double>{4, 6, 4, 6, 9, 6, 4, 6, 4});
}

TEST_CASE("conv matches the nested-loop reference") {
    std::mt19937 gen(41);
    for (int trial = 0; trial < 10; ++trial) {
        Tensor3 x = random_t3(gen, 2, 4, 4);
        ConvLayer l = random_conv(gen, 2, 3, 3);
        Tensor3 got = conv2d_forward(x, l);
        Tensor3 expected = conv_oracle(x, l);
        REQUIRE(got.values.size() == expected.values.size());
        for (std::size_t i = 0; i < got.values.size(); ++i)
            CHECK(std::abs(got.values[i] - expected.values[i]) < 1e-12);
    }
    try {
        conv2d_forward(random_t3(gen, 3, 4, 4), random_conv(gen, 2, 1, 3));
        FAIL("expected ChannelMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ChannelMismatch);
    }
}

TEST_CASE("maxpool2x2 basics") {
    Tensor3 x = Tensor3::zeros(1, 2, 2);
    x.values = {1, 2, 3, 4};
    auto [out, argmax] = maxpool2x2(x);
    CHECK(out.values == std::vector<double>{4});
    CHECK(argmax == std::vector<std::size_t>{3});

    Tensor3 flat = Tensor3::zeros(1, 4, 4);
    std::fill(flat.values.begin(), flat.values.end(), 2.5);
    auto [fout, fargmax] = maxpool2x2(flat);
    CHECK(fout.values == std::vector<double>(4, 2.5));
    // Ties keep the first (top-left) occurrence, row-major.
    CHECK(fargmax == std::vector<std::size_t>{0, 2, 8, 10});

    try {
        maxpool2x2(Tensor3::zeros(1, 3, 4));
        FAIL("expected OddDims");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OddDims);
    }
}

TEST_CASE("maxpool matches the window-scanning reference") {
    std::mt19937 gen(42);
    for (int trial = 0; trial < 10; ++trial) {
        Tensor3 x = random_t3(gen, 1, 6, 6);
        auto [out, argmax] = maxpool2x2(x);
        Tensor3 expected = pool_oracle(x);
        CHECK(out.values == expected.values);
        for (std::size_t i = 0; i < argmax.size(); ++i)
            CHECK(x.values[argmax[i]] == out.values[i]);
    }
}

TEST_CASE("relu clamps negatives") {
    std::vector<double> v{-1.0, 0.0, 2.0};
    CHECK(relu(v) == std::vector<double>{0.0, 0.0, 2.0});
    CHECK(relu(std::vector<double>{-5.0, -0.1}) == std::vector<double>{0.0, 0.0});
    std::mt19937 gen(43);
    Tensor3 t = random_t3(gen, 2, 3, 3);
    CHECK(relu(relu(t)).values == relu(t).values);
}

TEST_CASE("fc_forward basics and reference check") {
    FcLayer ident;
    ident.in_dim = ident.out_dim = 3;
    ident.weights = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    ident.bias = {0, 0, 0};
    std::vector<double> x{0.5, -2.0, 3.0};
    CHECK(fc_forward(x, ident) == x);

    FcLayer zero;
    zero.in_dim = 2;
    zero.out_dim = 2;
    zero.weights = {0, 0, 0, 0};
    zero.bias = {1.0, 2.0};
    CHECK(fc_forward({7.0, 8.0}, zero) == std::vector<double>{1.0, 2.0});

    std::mt19937 gen(44);
    FcLayer l = random_fc(gen, 4, 3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> in{d(gen), d(gen), d(gen), d(gen)};
    std::vector<double> got = fc_forward(in, l), expected = fc_oracle(in, l);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(got[i] - expected[i]) < 1e-12);

    try {
        fc_forward({1.0}, l);
        FAIL("expected DimMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimMismatch);
    }
}

TEST_CASE("softmax is stable and shift invariant") {
    std::vector<double> p = softmax({0.0, 0.0});
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));

    std::vector<double> q = softmax({1000.0, 0.0});
    CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q[1] < 1e-300);
    CHECK(std::isfinite(q[0]));

    std::mt19937 gen(45);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> z{d(gen), d(gen), d(gen)};
        double c = d(gen);
        std::vector<double> shifted{z[0] + c, z[1] + c, z[2] + c};
        std::vector<double> a = softmax(z), b = softmax(shifted);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
    }
}

TEST_CASE("cross entropy values") {
    CHECK(cross_entropy({1.0, 0.0}, 0) == 0.0);
    CHECK(cross_entropy({0.5, 0.5}, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(cross_entropy({1.0, 0.0}, 1) ==
          doctest::Approx(-std::log(1e-12)).epsilon(1e-12));  // clamped, finite
    try {
        cross_entropy({0.5, 0.5}, 2);
        FAIL("expected BadTarget");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadTarget);
    }
}

TEST_CASE("forward pass: normalization, symmetry and flatten dims") {
    std::mt19937 gen(46);
    CnnModel m = make_cnn(16, {4, 8}, 16, 9);
    GrayTensor x = random_tensor(gen, 16, 16);
    auto [probs, cache] = cnn_forward(m, x);
    CHECK(std::abs(probs[0] + probs[1] - 1.0) < 1e-12);
    CHECK(cache.pooled_last.height == 4);
    CHECK(cache.pooled_last.width == 4);

    CnnModel zero = make_cnn(16, {4, 8}, 16, 9);
    visit_params(zero, [](const std::string&, std::vector<double>& v) {
        std::fill(v.begin(), v.end(), 0.0);
    });
    auto [zp, zc] = cnn_forward(zero, x);
    CHECK(zp[0] == 0.5);
    CHECK(zp[1] == 0.5);

    CnnModel big = make_cnn(64, {8, 16, 32}, 128, 1);
    CHECK(big.fc1.in_dim == 2048);  // 32 channels x 8 x 8 after three pools

    try {
        cnn_forward(m, random_tensor(gen, 8, 8));
        FAIL("expected SizeMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SizeMismatch);
    }
}

TEST_CASE("fc2 bias gradient equals probs minus onehot exactly") {
    std::mt19937 gen(47);
    CnnModel m = make_cnn(8, {2}, 4, 13);
    GrayTensor x = random_tensor(gen, 8, 8);
    auto [probs, cache] = cnn_forward(m, x);
    CnnGradients g = cnn_backward(m, cache, 1);
    CHECK(g.fc2.bias[0] == probs[0]);
    CHECK(g.fc2.bias[1] == probs[1] - 1.0);
}

TEST_CASE("relu-dead units receive zero gradient") {
    std::mt19937 gen(48);
    CnnModel m = make_cnn(8, {2}, 4, 14);
    // Force one hidden unit dead for every input: large negative bias.
    m.fc1.bias[2] = -1e6;
    GrayTensor x = random_tensor(gen, 8, 8);
    auto [probs, cache] = cnn_forward(m, x);
    CnnGradients g = cnn_backward(m, cache, 0);
    CHECK(g.fc1.bias[2] == 0.0);
    for (int i = 0; i < m.fc1.in_dim; ++i)
        CHECK(g.fc1.weights[2 * m.fc1.in_dim + i] == 0.0);
}

TEST_CASE("analytic gradients match central differences on a tiny network") {
    GradCheckResult r = reference_gradient_check();
    CAPTURE(r.worst_param);
    CAPTURE(r.analytic);
    CAPTURE(r.numeric);
    CHECK(r.max_rel_err < 1e-4);
}

TEST_CASE("a perturbed gradient fails the finite-difference check") {
    std::mt19937 gen(49);
    CnnModel m = make_cnn(8, {2}, 4, 15);
    GrayTensor x = random_tensor(gen, 8, 8);
    CnnGradients g = cnn_gradients(m, x, 0);
    g.fc2.bias[0] += 0.05;  // deliberate corruption
    GradCheckResult r = compare_to_numeric(m, x, 0, 1e-5, g);
    CHECK(r.max_rel_err > 1e-4);
}

TEST_CASE("training is deterministic for a fixed seed") {
    Dataset ds = tiny_image_dataset(6, 32, 3);
    CnnTrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch = 4;
    cfg.conv_channels = {2, 4};
    cfg.fc_hidden = 8;
    cfg.seed = 21;
    auto [m1, log1] = cnn_train(ds, cfg);
    auto [m2, log2] = cnn_train(ds, cfg);
    REQUIRE(log1.size() == log2.size());
    for (std::size_t e = 0; e < log1.size(); ++e) {
        CHECK(log1[e].mean_loss == log2[e].mean_loss);
        CHECK(log1[e].accuracy == log2[e].accuracy);
    }
    CHECK(m1.fc2.weights == m2.fc2.weights);
    CHECK(m1.conv[0].kernels == m2.conv[0].kernels);
}

TEST_CASE("a small network overfits a small sample set") {
    Dataset ds = tiny_image_dataset(8, 32, 11);  // 16 samples
    CnnTrainConfig cfg;
    cfg.epochs = 150;
    cfg.batch = 16;
    cfg.lr = 0.02;
    cfg.conv_channels = {4, 8};
    cfg.fc_hidden = 32;
    cfg.seed = 2;
    auto [m, log] = cnn_train(ds, cfg);
    REQUIRE(!log.empty());
    CHECK(log.back().accuracy >= 0.99);
    CHECK(log.back().mean_loss < log.front().mean_loss);
}

TEST_CASE("training rejects invalid configurations") {
    Dataset ds = tiny_image_dataset(3, 32, 5);
    CnnTrainConfig bad;
    bad.conv_channels = {8};
    CHECK_THROWS_AS(cnn_train(ds, bad), Error);

    Dataset single;
    single.feature_dim = ds.feature_dim;
    for (const auto& s : ds.samples)
        if (s.label == Label::Drone) single.samples.push_back(s);
    try {
        cnn_train(single, {});
        FAIL("expected SingleClassDataset");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingleClassDataset);
    }
}

TEST_CASE("cnn_predict maps class indices and ignores logit shifts") {
    CnnModel m = make_cnn(16, {2, 2}, 4, 0);
    visit_params(m, [](const std::string&, std::vector<double>& v) {
        std::fill(v.begin(), v.end(), 0.0);
    });
    GrayTensor x;
    x.width = x.height = 16;
    x.values.assign(256, 0.3);

    m.fc2.bias = {1.0, 0.0};
    CHECK(cnn_predict(m, x) == Label::Drone);
    m.fc2.bias = {0.0, 1.0};
    CHECK(cnn_predict(m, x) == Label::Bird);
    m.fc2.bias = {0.0 + 7.5, 1.0 + 7.5};  // constant shift changes nothing
    CHECK(cnn_predict(m, x) == Label::Bird);
}

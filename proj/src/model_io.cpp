#include "avdb/model_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "avdb/error.hpp"

static_assert(std::numeric_limits<double>::is_iec559, "IEEE-754 doubles required");

namespace avdb {

namespace {

constexpr char kMagic[] = "AVDB1\n";
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) raise(ErrorCode::IoError, "cannot write " + path.string());
    }
    void bytes(const void* p, std::size_t n) {
        out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) {
        std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                             static_cast<std::uint8_t>(v >> 16),
                             static_cast<std::uint8_t>(v >> 24)};
        bytes(b, 4);
    }
    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v));
        u32(static_cast<std::uint32_t>(v >> 32));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f64s(const std::vector<double>& v) {
        for (double x : v) f64(x);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void check() {
        if (!out_) raise(ErrorCode::IoError, "short write while saving model");
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_) raise(ErrorCode::BadModelFile, "cannot open " + path.string());
    }
    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n))
            raise(ErrorCode::BadModelFile, "truncated model file");
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint8_t b[4];
        bytes(b, 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) |
               (static_cast<std::uint32_t>(b[3]) << 24);
    }
    std::uint64_t u64() {
        std::uint64_t lo = u32();
        std::uint64_t hi = u32();
        return lo | (hi << 32);
    }
    double f64() { return std::bit_cast<double>(u64()); }
    void f64s(std::vector<double>& v, std::size_t n) {
        v.resize(n);
        for (auto& x : v) x = f64();
    }
    std::string str(std::size_t max_len = 1 << 20) {
        std::uint32_t n = u32();
        if (n > max_len) raise(ErrorCode::BadModelFile, "oversized string field");
        std::string s(n, '\0');
        if (n) bytes(s.data(), n);
        return s;
    }

private:
    std::ifstream in_;
};

std::string format_double17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string encode_info(const ModelInfo& info) {
    std::string s;
    s += "classifier=" + info.kind + "\n";
    s += "image_size=" + std::to_string(info.image_size) + "\n";
    s += std::string("feature_mode=") + feature_mode_name(info.feature_mode) + "\n";
    s += "train_fraction=" + format_double17(info.train_fraction) + "\n";
    s += "seed=" + std::to_string(info.seed) + "\n";
    for (const auto& [k, v] : info.params) s += k + "=" + v + "\n";
    return s;
}

ModelInfo decode_info(const std::string& text, const std::string& kind) {
    ModelInfo info;
    info.kind = kind;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "classifier") {
            if (val != kind) raise(ErrorCode::BadModelFile, "kind tag mismatch");
        } else if (key == "image_size") {
            info.image_size = std::stoi(val);
        } else if (key == "feature_mode") {
            info.feature_mode = val == "raw" ? FeatureMode::RawPixels : FeatureMode::Hog;
        } else if (key == "train_fraction") {
            info.train_fraction = std::strtod(val.c_str(), nullptr);
        } else if (key == "seed") {
            info.seed = std::stoull(val);
        } else {
            info.params[key] = val;
        }
    }
    return info;
}

}  // namespace

void save_model(const std::filesystem::path& path, const ModelContainer& c) {
    Writer w(path);
    w.bytes(kMagic, 6);
    w.bytes(c.info.kind.data(), 3);
    w.u32(kVersion);
    w.str(encode_info(c.info));

    if (c.info.kind == "knn") {
        const auto& m = std::get<KnnModel>(c.model);
        w.u32(m.k);
        w.u32(static_cast<std::uint32_t>(m.feature_dim));
        w.u64(m.train.size());
        for (const auto& s : m.train) {
            w.str(s.id);
            w.u8(s.label == Label::Drone ? 1 : 0);
            w.f64s(s.features);
        }
    } else if (c.info.kind == "svm") {
        const auto& m = std::get<SvmModel>(c.model);
        w.u32(static_cast<std::uint32_t>(m.dim()));
        w.f64(m.b);
        w.f64s(m.w);
    } else if (c.info.kind == "cnn") {
        const auto& m = std::get<CnnModel>(c.model);
        w.u32(static_cast<std::uint32_t>(m.input_size));
        w.u32(static_cast<std::uint32_t>(m.conv.size()));
        for (const auto& l : m.conv) w.u32(static_cast<std::uint32_t>(l.out_channels));
        w.u32(static_cast<std::uint32_t>(m.fc1.out_dim));
        visit_params(m, [&w](const std::string&, const std::vector<double>& v) {
            w.f64s(v);
        });
    } else {
        raise(ErrorCode::InvalidArgument, "unknown model kind " + c.info.kind);
    }
    w.check();
}

ModelContainer load_model(const std::filesystem::path& path) {
    Reader r(path);
    char magic[6];
    r.bytes(magic, 6);
    if (std::memcmp(magic, kMagic, 6) != 0)
        raise(ErrorCode::BadModelFile, "bad magic in " + path.string());
    char kind_c[3];
    r.bytes(kind_c, 3);
    std::string kind(kind_c, 3);
    if (kind != "knn" && kind != "svm" && kind != "cnn")
        raise(ErrorCode::BadModelFile, "unknown kind tag '" + kind + "'");
    std::uint32_t version = r.u32();
    if (version != kVersion)
        raise(ErrorCode::BadModelFile, "unsupported version " + std::to_string(version));

    ModelContainer c;
    c.info = decode_info(r.str(), kind);

    if (kind == "knn") {
        KnnModel m;
        m.k = r.u32();
        m.feature_dim = r.u32();
        std::uint64_t count = r.u64();
        if (count == 0 || count > (1ull << 32))
            raise(ErrorCode::BadModelFile, "implausible sample count");
        m.train.resize(count);
        for (auto& s : m.train) {
            s.id = r.str();
            s.label = r.u8() ? Label::Drone : Label::Bird;
            r.f64s(s.features, m.feature_dim);
        }
        c.model = std::move(m);
    } else if (kind == "svm") {
        SvmModel m;
        std::uint32_t dim = r.u32();
        m.b = r.f64();
        r.f64s(m.w, dim);
        c.model = std::move(m);
    } else {
        std::uint32_t input_size = r.u32();
        std::uint32_t depth = r.u32();
        if (depth == 0 || depth > 8) raise(ErrorCode::BadModelFile, "implausible depth");
        std::vector<int> channels(depth);
        for (auto& ch : channels) ch = static_cast<int>(r.u32());
        std::uint32_t fc_hidden = r.u32();
        CnnModel m = make_cnn(static_cast<int>(input_size), channels,
                              static_cast<int>(fc_hidden), 0);
        visit_params(m, [&r](const std::string&, std::vector<double>& v) {
            r.f64s(v, v.size());
        });
        c.model = std::move(m);
    }
    return c;
}

Label predict_any(const ModelContainer& c, const FeatureVector& x) {
    if (const auto* knn = std::get_if<KnnModel>(&c.model)) return knn_predict(*knn, x);
    if (const auto* svm = std::get_if<SvmModel>(&c.model)) return svm_predict(*svm, x);
    const auto& cnn = std::get<CnnModel>(c.model);
    return cnn_predict(cnn, features_as_tensor(x, cnn.input_size));
}

std::string params_summary(const ModelContainer& c) {
    std::string s;
    for (const auto& [k, v] : c.info.params) {
        if (!s.empty()) s += ';';
        s += k + "=" + v;
    }
    return s;
}

}  // namespace avdb

#include "avdb/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "avdb/error.hpp"
#include "avdb/rng.hpp"

namespace fs = std::filesystem;

namespace avdb {

std::size_t Dataset::count(Label l) const {
    std::size_t n = 0;
    for (const auto& s : samples)
        if (s.label == l) ++n;
    return n;
}

namespace {

FeatureVector featurize(const GrayTensor& t, FeatureMode mode, const HogConfig& hog) {
    if (mode == FeatureMode::RawPixels) return t.values;
    return hog_descriptor(t, hog);
}

std::vector<std::uint8_t> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open " + p.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

bool has_image_ext(const fs::path& p) {
    auto ext = p.extension().string();
    return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

// --- synthetic silhouette rendering ---------------------------------------

struct Vec2 {
    double x = 0.0, y = 0.0;
};

double dist_point(const Vec2& p, const Vec2& c) {
    double dx = p.x - c.x, dy = p.y - c.y;
    return std::sqrt(dx * dx + dy * dy);
}

double dist_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    double abx = b.x - a.x, aby = b.y - a.y;
    double apx = p.x - a.x, apy = p.y - a.y;
    double len2 = abx * abx + aby * aby;
    double t = len2 > 0.0 ? std::clamp((apx * abx + apy * aby) / len2, 0.0, 1.0) : 0.0;
    double dx = apx - t * abx, dy = apy - t * aby;
    return std::sqrt(dx * dx + dy * dy);
}

// Signed distance of one silhouette; negative inside.
struct Silhouette {
    struct Disc {
        Vec2 center;
        double radius;
    };
    struct Stroke {
        Vec2 a, b;
        double half_w_a, half_w_b;  // round caps, linearly tapered width
    };
    std::vector<Disc> discs;
    std::vector<Stroke> strokes;

    double distance(const Vec2& p) const {
        double d = 1e30;
        for (const auto& c : discs) d = std::min(d, dist_point(p, c.center) - c.radius);
        for (const auto& s : strokes) {
            double abx = s.b.x - s.a.x, aby = s.b.y - s.a.y;
            double len2 = abx * abx + aby * aby;
            double t = len2 > 0.0
                           ? std::clamp(((p.x - s.a.x) * abx + (p.y - s.a.y) * aby) / len2,
                                        0.0, 1.0)
                           : 0.0;
            double hw = s.half_w_a + t * (s.half_w_b - s.half_w_a);
            d = std::min(d, dist_segment(p, s.a, s.b) - hw);
        }
        return d;
    }
};

// Body disc plus four thin arms with rotor discs at the tips. The circular
// rotors spread gradient energy across all orientations, which is the
// hog-visible trait separating drones from the birds' peaked strokes.
Silhouette make_drone(Rng& rng, const Vec2& center, double radius, double rot) {
    Silhouette s;
    s.discs.push_back({center, 0.22 * radius});
    for (int k = 0; k < 4; ++k) {
        double jitter = rng.uniform(-0.14, 0.14);  // ~8 degrees
        double ang = rot + std::numbers::pi / 4.0 + k * std::numbers::pi / 2.0 + jitter;
        Vec2 tip{center.x + 0.80 * radius * std::cos(ang),
                 center.y + 0.80 * radius * std::sin(ang)};
        double arm_w = std::max(0.030 * radius, 0.45);
        s.strokes.push_back({center, tip, arm_w, arm_w});
        s.discs.push_back({tip, 0.18 * radius});
    }
    return s;
}

Silhouette make_bird(Rng& rng, const Vec2& center, double radius, double rot) {
    Silhouette s;
    double spread = rng.uniform(1.85, 2.30);  // wing opening angle, ~106..132 deg
    double droop = rng.uniform(0.04, 0.12);   // arc sag toward the heading
    for (int side = 0; side < 2; ++side) {
        double sgn = side == 0 ? 1.0 : -1.0;
        double wing_ang = rot + sgn * spread * 0.5;
        Vec2 tip{center.x + radius * std::cos(wing_ang),
                 center.y + radius * std::sin(wing_ang)};
        // Quadratic arc from body point to wing tip, sagging along the heading.
        Vec2 ctrl{center.x + 0.55 * radius * std::cos(wing_ang) +
                      droop * radius * std::cos(rot),
                  center.y + 0.55 * radius * std::sin(wing_ang) +
                      droop * radius * std::sin(rot)};
        const int kSegments = 16;
        double w_body = std::max(0.09 * radius, 0.8);
        double w_tip = std::max(0.05 * radius, 0.5);
        Vec2 prev = center;
        for (int i = 1; i <= kSegments; ++i) {
            double t = static_cast<double>(i) / kSegments;
            double u = 1.0 - t;
            Vec2 q{u * u * center.x + 2.0 * u * t * ctrl.x + t * t * tip.x,
                   u * u * center.y + 2.0 * u * t * ctrl.y + t * t * tip.y};
            double t0 = static_cast<double>(i - 1) / kSegments;
            s.strokes.push_back({prev, q, w_body + t0 * (w_tip - w_body),
                                 w_body + t * (w_tip - w_body)});
            prev = q;
        }
    }
    return s;
}

}  // namespace

Image render_sample(std::uint64_t seed, Label label, std::uint32_t index, int size) {
    if (size < 32) raise(ErrorCode::InvalidArgument, "synthetic size must be >= 32");
    std::uint64_t stream = static_cast<std::uint64_t>(index) * 2 +
                           (label == Label::Drone ? 0 : 1);
    Rng rng(mix_seed(seed, stream));

    double bg = rng.uniform(0.30, 0.70);
    bool light_fg = rng.next_below(2) == 1;
    double contrast = rng.uniform(0.45, 0.65);
    double fg = std::clamp(light_fg ? bg + contrast : bg - contrast, 0.0, 1.0);

    Vec2 center{size * 0.5 + rng.uniform(-0.15, 0.15) * size,
                size * 0.5 + rng.uniform(-0.15, 0.15) * size};
    double radius = rng.uniform(0.35, 0.70) * size * 0.5;
    double rot = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double sigma = rng.uniform(0.02, 0.08);

    Silhouette shape = label == Label::Drone ? make_drone(rng, center, radius, rot)
                                             : make_bird(rng, center, radius, rot);

    Image img;
    img.width = size;
    img.height = size;
    img.channels = 1;
    img.pixels.resize(static_cast<std::size_t>(size) * size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            double d = shape.distance({x + 0.5, y + 0.5});
            double alpha = std::clamp(0.5 - d, 0.0, 1.0);  // 1-px anti-alias band
            double v = bg + alpha * (fg - bg) + sigma * rng.next_gaussian();
            long q = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
            img.pixels[static_cast<std::size_t>(y) * size + x] =
                static_cast<std::uint8_t>(q);
        }
    }
    return img;
}

Dataset load_directory(const fs::path& root, int image_size, FeatureMode mode,
                       const HogConfig& hog) {
    Dataset ds;
    const std::pair<const char*, Label> classes[] = {{"drone", Label::Drone},
                                                     {"bird", Label::Bird}};
    for (const auto& [name, label] : classes) {
        fs::path dir = root / name;
        std::vector<fs::path> files;
        if (fs::is_directory(dir)) {
            for (const auto& e : fs::directory_iterator(dir))
                if (e.is_regular_file() && has_image_ext(e.path()))
                    files.push_back(e.path());
        }
        if (files.empty())
            raise(ErrorCode::EmptyClass,
                  "class folder " + dir.string() + " has no images");
        std::sort(files.begin(), files.end(),
                  [](const fs::path& a, const fs::path& b) {
                      return a.filename().string() < b.filename().string();
                  });
        for (const auto& f : files) {
            try {
                Image img = decode_image(read_file(f));
                GrayTensor t =
                    normalize(resize_bilinear(to_grayscale(img), image_size, image_size));
                ds.samples.push_back(
                    {f.filename().string(), featurize(t, mode, hog), label});
            } catch (const Error& e) {
                raise(e.code(), f.string() + ": " + e.what());
            }
        }
    }
    ds.feature_dim = ds.samples.front().features.size();
    for (const auto& s : ds.samples)
        if (s.features.size() != ds.feature_dim)
            raise(ErrorCode::DimMismatch, "inconsistent feature dim in " + s.id);
    return ds;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, const SplitSpec& spec) {
    if (ds.samples.empty()) raise(ErrorCode::EmptyDataset, "cannot split empty dataset");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        raise(ErrorCode::InvalidArgument, "train_fraction must be in (0, 1)");

    std::vector<char> in_train(ds.samples.size(), 0);
    Rng rng(spec.seed);
    for (Label label : {Label::Drone, Label::Bird}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < ds.samples.size(); ++i)
            if (ds.samples[i].label == label) idx.push_back(i);
        rng.shuffle(idx);
        std::size_t take = static_cast<std::size_t>(
            std::floor(spec.train_fraction * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < take; ++i) in_train[idx[i]] = 1;
    }

    Dataset train, test;
    train.feature_dim = test.feature_dim = ds.feature_dim;
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
        (in_train[i] ? train : test).samples.push_back(ds.samples[i]);
    return {std::move(train), std::move(test)};
}

Dataset generate_synthetic(std::uint32_t count_per_class, int size, std::uint64_t seed,
                           FeatureMode mode, const HogConfig& hog) {
    if (count_per_class < 1)
        raise(ErrorCode::InvalidArgument, "count_per_class must be >= 1");
    Dataset ds;
    char id[32];
    for (Label label : {Label::Drone, Label::Bird}) {
        for (std::uint32_t i = 0; i < count_per_class; ++i) {
            std::snprintf(id, sizeof id, "%s_%05u", label_name(label), i);
            GrayTensor t = normalize(render_sample(seed, label, i, size));
            ds.samples.push_back({id, featurize(t, mode, hog), label});
        }
    }
    ds.feature_dim = ds.samples.front().features.size();
    return ds;
}

std::size_t write_synthetic(const fs::path& root, std::uint32_t count_per_class,
                            int size, std::uint64_t seed) {
    if (count_per_class < 1)
        raise(ErrorCode::InvalidArgument, "count_per_class must be >= 1");
    std::error_code ec;
    fs::create_directories(root / "drone", ec);
    fs::create_directories(root / "bird", ec);
    std::ofstream manifest(root / "manifest.csv", std::ios::binary);
    if (!manifest)
        raise(ErrorCode::IoError, "cannot write manifest in " + root.string());
    manifest << "id,class,seed,index\n";

    std::size_t written = 0;
    char id[32];
    for (Label label : {Label::Drone, Label::Bird}) {
        for (std::uint32_t i = 0; i < count_per_class; ++i) {
            std::snprintf(id, sizeof id, "%s_%05u", label_name(label), i);
            Image img = render_sample(seed, label, i, size);
            auto bytes = encode_image(img);
            fs::path file = root / label_name(label) / (std::string(id) + ".pgm");
            std::ofstream out(file, std::ios::binary);
            if (!out) raise(ErrorCode::IoError, "cannot write " + file.string());
            out.write(reinterpret_cast<const char*>(bytes.data()),
                      static_cast<std::streamsize>(bytes.size()));
            if (!out) raise(ErrorCode::IoError, "short write to " + file.string());
            manifest << id << ',' << label_name(label) << ',' << seed << ',' << i
                     << '\n';
            ++written;
        }
    }
    return written;
}

GrayTensor features_as_tensor(const FeatureVector& f, int size) {
    if (f.size() != static_cast<std::size_t>(size) * size)
        raise(ErrorCode::SizeMismatch, "feature vector is not a size^2 image");
    GrayTensor t;
    t.width = size;
    t.height = size;
    t.values = f;
    return t;
}

}  // namespace avdb

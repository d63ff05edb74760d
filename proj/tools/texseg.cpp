// texseg command-line front end.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "texseg/texseg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace texseg;

namespace {

struct Common {
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out = ".";
};

struct RunContext {
    std::string command;
    std::vector<std::string> argv;
    Common common;
    json params = json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    fs::path out_dir() const { return fs::path(common.out); }

    fs::path output(const std::string& name) {
        const fs::path p = out_dir() / name;
        outputs.push_back(p.string());
        return p;
    }

    void write_manifest() {
        const fs::path path = out_dir() / "manifest.json";
        json m;
        m["command"] = command;
        m["argv"] = argv;
        m["seed"] = common.seed;
        m["parameters"] = params;
        m["inputs"] = inputs;
        m["outputs"] = outputs;
        m["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_text(path, m.dump(2) + "\n");
    }
};

[[noreturn]] void usage_error(const std::string& msg) { throw CLI::ValidationError(msg); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& s, const char* what) {
    std::vector<T> out;
    for (const auto& item : split(s, ',')) {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(static_cast<T>(v));
        } catch (const std::exception&) {
            usage_error(std::string("invalid ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty()) usage_error(std::string("empty ") + what + " list");
    return out;
}

Padding parse_padding(const std::string& s) {
    if (s == "reflect") return Padding::Reflect;
    if (s == "wrap") return Padding::Wrap;
    if (s == "shrink") return Padding::Shrink;
    usage_error("unknown padding '" + s + "' (reflect|wrap|shrink)");
}

Metric parse_metric(const std::string& s) {
    if (s == "linf") return Metric::Linf;
    if (s == "l2") return Metric::L2;
    usage_error("unknown metric '" + s + "' (linf|l2)");
}

// ma1..ma4[:h], kernel:<variance>, or an image path.
TextureSource parse_source(const std::string& spec, int default_half_width, double kernel_scale) {
    if (spec.size() >= 3 && spec.compare(0, 2, "ma") == 0 && spec[2] >= '1' && spec[2] <= '4' &&
        (spec.size() == 3 || spec[3] == ':')) {
        int h = default_half_width;
        if (spec.size() > 3) h = std::stoi(spec.substr(4));
        MAModel model{variant_from_number(spec[2] - '0'), h, true};
        validate(model);
        return source::MovingAverage{model};
    }
    if (spec.compare(0, 7, "kernel:") == 0) {
        const double v = std::stod(spec.substr(7));
        if (!(v > 0.0)) usage_error("kernel variance must be > 0");
        return source::Kernel{Mat2::isotropic(v), kernel_scale};
    }
    if (fs::exists(spec)) return source::ImageFile{spec};
    usage_error("unknown texture source '" + spec + "' (ma1..ma4[:h], kernel:<variance>, or an image file)");
}

RegionGeometry parse_geometry(const std::string& s, std::optional<double> radius) {
    if (s == "vsplit") return geometry::VSplit{};
    if (s == "hsplit") return geometry::HSplit{};
    if (s == "disk") return geometry::Disk{std::nullopt, std::nullopt, radius};
    if (s == "quadrants") return geometry::Quadrants{};
    if (s.compare(0, 5, "mask:") == 0) return geometry::MaskFile{s.substr(5)};
    usage_error("unknown geometry '" + s + "' (vsplit|hsplit|disk|quadrants|mask:<path>)");
}

void stage(const std::string& msg) { std::cerr << "texseg: " << msg << '\n'; }

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string models;
    std::string geom = "vsplit";
    std::size_t size = 128;
    std::optional<double> radius;
    int ma_half_width = 11;
    double kernel_scale = 1.0;
    bool no_standardize = false;
};

void cmd_generate(RunContext& ctx, const GenerateArgs& a) {
    std::vector<TextureSource> sources;
    for (const auto& s : split(a.models, ',')) sources.push_back(parse_source(s, a.ma_half_width, a.kernel_scale));
    const RegionGeometry geom = parse_geometry(a.geom, a.radius);
    const std::size_t regions = region_count(geom);
    if (sources.size() != regions)
        usage_error("geometry '" + a.geom + "' needs " + std::to_string(regions) + " sources, got " +
                    std::to_string(sources.size()));
    ctx.params = {{"models", a.models}, {"geom", a.geom},           {"size", a.size},
                  {"ma_half_width", a.ma_half_width}, {"kernel_scale", a.kernel_scale},
                  {"standardize", !a.no_standardize}};
    if (a.radius) ctx.params["radius"] = *a.radius;
    stage("composing " + shape_string(a.size, a.size) + " mosaic");
    const Mosaic mosaic = compose_mosaic(sources, geom, a.size, a.size, Seed{ctx.common.seed}, !a.no_standardize);
    fs::create_directories(ctx.out_dir());
    write_texf(ctx.output("mosaic.texf"), mosaic.image);
    write_preview_pgm(ctx.output("mosaic.pgm"), mosaic.image);
    write_label_pgm(ctx.output("truth.pgm"), mosaic.truth);
    ctx.write_manifest();
}

// ---------------------------------------------------------------------------

struct FeatureArgs {
    std::string input;
    std::optional<int> m;
    std::string padding = "reflect";
    bool with_location = false;
};

Field load_input(RunContext& ctx, const std::string& path) {
    ctx.inputs.push_back(path);
    return load_grayscale_image(path);
}

void cmd_features(RunContext& ctx, const FeatureArgs& a) {
    const Field field = load_input(ctx, a.input);
    const PatchParams pp{a.m.value_or(default_half_width(field.rows())), parse_padding(a.padding)};
    ctx.params = {{"m", pp.half_width}, {"padding", a.padding}, {"with_location", a.with_location}};
    stage("features at " + std::to_string(field.size()) + " pixels, m=" + std::to_string(pp.half_width));
    const FeatureField ff = all_features(field, pp, a.with_location);
    fs::create_directories(ctx.out_dir());
    write_texc(ctx.output("features.texc"), to_dump(ff));
    ctx.write_manifest();
}

// ---------------------------------------------------------------------------

struct SegmentArgs {
    std::string input;
    std::string algo;
    std::optional<std::size_t> k;
    std::optional<int> m;
    bool with_location = false;
    std::optional<double> b;
    std::optional<double> beta;
    std::size_t min_size = 0;
    std::size_t restarts = 10;
    std::size_t max_iters = 300;
    std::size_t stride = 8;
    std::string padding = "reflect";
    std::string metric = "linf";
    std::string truth;
};

void cmd_segment(RunContext& ctx, const SegmentArgs& a) {
    const bool needs_k = a.algo == "kmeans" || a.algo == "slink-k" || a.algo == "ward";
    if (!needs_k && a.algo != "slink-threshold")
        usage_error("unknown --algo '" + a.algo + "' (kmeans|slink-threshold|slink-k|ward)");
    if (needs_k && !a.k) usage_error("--algo " + a.algo + " requires --k");
    if (a.algo == "slink-threshold" && !a.b && !a.beta) usage_error("--algo slink-threshold requires --b or --beta");

    const Field field = load_input(ctx, a.input);
    SegmentOptions so;
    so.patch = {a.m.value_or(default_half_width(field.rows())), parse_padding(a.padding)};
    so.with_location = a.with_location;
    so.k = a.k.value_or(2);
    so.min_cluster_size = a.min_size;
    so.restarts = a.restarts;
    so.max_iters = a.max_iters;
    so.seed = Seed{ctx.common.seed};
    so.metric = parse_metric(a.metric);
    so.stride = a.stride;
    ctx.params = {{"algo", a.algo},          {"m", so.patch.half_width}, {"padding", a.padding},
                  {"with_location", a.with_location}, {"min_size", a.min_size}, {"metric", a.metric}};

    Segmentation seg;
    stage("segmenting with " + a.algo);
    if (a.algo == "kmeans") {
        ctx.params["k"] = so.k;
        ctx.params["restarts"] = so.restarts;
        ctx.params["max_iters"] = so.max_iters;
        seg = segment_kmeans(field, so);
    } else if (a.algo == "slink-threshold") {
        const double b = a.b.value_or(theoretical_threshold(static_cast<double>(field.rows()), a.beta.value_or(1.5)));
        ctx.params["b"] = b;
        if (a.beta) ctx.params["beta"] = *a.beta;
        seg = segment_threshold(field, so, b);
    } else {
        ctx.params["k"] = so.k;
        ctx.params["stride"] = so.stride;
        seg = segment_agglomerative(field, so, a.algo == "ward" ? Linkage::Ward : Linkage::Single);
    }

    fs::create_directories(ctx.out_dir());
    write_label_pgm(ctx.output("labels.pgm"), seg.labels);
    write_text(ctx.output("labels.csv"), encode_label_csv(seg.labels));
    std::ostringstream result;
    result << "objective_sq_euclid,objective_sq_linf,iterations,restart_index,seed\n";
    if (seg.kmeans) {
        const ClusterResult& r = *seg.kmeans;
        result << format_exact(r.objective_sq_euclid) << ',' << format_exact(r.objective_sq_linf) << ','
               << r.iterations << ',' << r.restart_index << ',' << r.seed.value << '\n';
    } else {
        result << "nan,nan,0,0," << ctx.common.seed << '\n';
    }
    write_text(ctx.output("result.csv"), result.str());
    if (!a.truth.empty()) {
        ctx.inputs.push_back(a.truth);
        const LabelMap truth = read_label_pgm(a.truth);
        const MatchReport rep = best_injective_match(seg.labels.values(), truth.values());
        std::cout << "accuracy=" << format_fixed(rep.accuracy, 4) << '\n';
    }
    std::cout << "clusters=" << label_count(seg.labels) << '\n';
    ctx.write_manifest();
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
    std::string labels;
    std::string truth;
    std::optional<std::size_t> k;
};

void cmd_evaluate(RunContext& ctx, const EvaluateArgs& a) {
    ctx.inputs = {a.labels, a.truth};
    const LabelMap est = read_label_pgm(a.labels);
    const LabelMap truth = read_label_pgm(a.truth);
    if (!est.same_shape(truth))
        throw std::invalid_argument("label map is " + shape_string(est.rows(), est.cols()) + " but truth is " +
                                    shape_string(truth.rows(), truth.cols()));
    const std::size_t k = a.k.value_or(std::max(label_count(est), label_count(truth)));
    ctx.params = {{"k", k}};
    const bool exhaustive = k <= kMaxPermutationLabels && label_count(est) <= k && label_count(truth) <= k;
    const MatchReport rep = exhaustive ? best_permutation_match(est, truth, k)
                                       : best_injective_match(est.values(), truth.values());
    std::ostringstream csv;
    csv << "accuracy,error_rate,mismatched_count,total,permutation\n";
    csv << format_fixed(rep.accuracy, 4) << ',' << format_fixed(rep.error_rate, 4) << ',' << rep.mismatched_count
        << ',' << rep.total << ',';
    for (std::size_t i = 0; i < rep.permutation.size(); ++i) csv << (i ? " " : "") << rep.permutation[i];
    csv << '\n';
    fs::create_directories(ctx.out_dir());
    write_text(ctx.output("match.csv"), csv.str());
    std::cout << "accuracy=" << format_fixed(rep.accuracy, 4) << '\n';
    ctx.write_manifest();
}

// ---------------------------------------------------------------------------

struct ReproduceArgs {
    int table = 1;
    std::string brodatz_dir;
    std::size_t size = 0;
    std::string seeds;
    int m = 11;
    int ma_half_width = 11;
    std::size_t restarts = 5;
    std::size_t stride = 8;
    double min_fraction = 0.1;
    bool no_location = false;
};

void cmd_reproduce(RunContext& ctx, const ReproduceArgs& a) {
    ReproduceOptions opt;
    opt.table = a.table;
    opt.brodatz_dir = a.brodatz_dir;
    opt.size = a.size;
    opt.half_width = a.m;
    opt.ma_half_width = a.ma_half_width;
    opt.restarts = a.restarts;
    opt.stride = a.stride;
    opt.min_cluster_fraction = a.min_fraction;
    opt.with_location = !a.no_location;
    opt.seeds = a.seeds.empty() ? std::vector<std::uint64_t>{ctx.common.seed}
                                : parse_list<std::uint64_t>(a.seeds, "seed");
    if (opt.table != 1 && a.brodatz_dir.empty())
        throw std::invalid_argument(
            "table " + std::to_string(opt.table) +
            " needs --brodatz-dir with user-supplied D4.pgm, D6.pgm, D20.pgm, D21.pgm, D34.pgm, D52.pgm, D55.pgm, "
            "D77.pgm");
    ctx.params = {{"table", opt.table}, {"m", opt.half_width},        {"ma_half_width", opt.ma_half_width},
                  {"seeds", opt.seeds}, {"restarts", opt.restarts},   {"stride", opt.stride},
                  {"min_fraction", opt.min_cluster_fraction},         {"with_location", opt.with_location}};
    if (!a.brodatz_dir.empty()) ctx.inputs.push_back(a.brodatz_dir);
    stage("reproducing table " + std::to_string(opt.table));
    const AccuracyTable table = reproduce_table(opt);
    std::string seed_text;
    for (std::size_t i = 0; i < opt.seeds.size(); ++i) seed_text += (i ? "," : "") + std::to_string(opt.seeds[i]);
    const std::string csv = table_csv(table, seed_text);
    fs::create_directories(ctx.out_dir());
    write_text(ctx.output("table" + std::to_string(opt.table) + ".csv"), csv);
    std::cout << csv;
    ctx.write_manifest();
}

// ---------------------------------------------------------------------------

struct TheoryArgs {
    std::string experiment;
    std::string n_list;
    std::size_t replicates = 0;
    double a = 0.3;
    std::string model = "ma3";
    std::string model0 = "ma1";
    std::string model1 = "ma2";
    int ma_half_width = 1;
    std::optional<double> b;
    double beta = 1.5;
    double scale = 5.0;
    double sigma0 = 1.0;
    double sigma1 = 9.0;
    std::size_t pairs = 200;
};

MAModel parse_ma(const std::string& s, int h) {
    const TextureSource src = parse_source(s, h, 1.0);
    const auto* ma = std::get_if<source::MovingAverage>(&src);
    if (!ma) usage_error("theory experiments need moving-average models (ma1..ma4), got '" + s + "'");
    return ma->model;
}

void cmd_theory(RunContext& ctx, const TheoryArgs& a) {
    const Seed seed{ctx.common.seed};
    std::string csv;
    ctx.params = {{"experiment", a.experiment}};
    if (a.experiment == "concentration") {
        const auto ns = parse_list<std::size_t>(a.n_list.empty() ? "36,64,100,144" : a.n_list, "n");
        const std::size_t reps = a.replicates ? a.replicates : 300;
        const MAModel model = parse_ma(a.model, a.ma_half_width);
        ctx.params.update({{"n", ns}, {"replicates", reps}, {"a", a.a}, {"model", model_number(model.variant)},
                           {"ma_half_width", model.half_width}});
        csv = concentration_csv(concentration_experiment(model, ns, a.a, reps, seed), seed);
    } else if (a.experiment == "consistency") {
        const auto ns = parse_list<std::size_t>(a.n_list.empty() ? "36,64,100,144" : a.n_list, "n");
        ConsistencyParams p;
        p.replicates = a.replicates ? a.replicates : 20;
        p.beta = a.beta;
        const MAModel m0 = parse_ma(a.model0, a.ma_half_width), m1 = parse_ma(a.model1, a.ma_half_width);
        ctx.params.update({{"n", ns}, {"replicates", p.replicates}, {"beta", p.beta}, {"model0", a.model0},
                           {"model1", a.model1}, {"ma_half_width", a.ma_half_width}});
        csv = consistency_csv(consistency_experiment(m0, m1, ns, p, seed), seed);
    } else if (a.experiment == "theorem2") {
        Theorem2Params p;
        p.size0 = Mat2::isotropic(a.sigma0);
        p.size1 = Mat2::isotropic(a.sigma1);
        p.n = a.n_list.empty() ? 49 : parse_list<std::size_t>(a.n_list, "n").front();
        if (p.n > 64) usage_error("theorem2 uses the dense sampler; n must be <= 64");
        p.coord_scale = a.scale;
        p.b = a.b ? a.b : std::optional<double>(0.8);
        p.beta = a.beta;
        p.replicates = a.replicates ? a.replicates : 10;
        ctx.params.update({{"n", p.n}, {"sigma0", a.sigma0}, {"sigma1", a.sigma1}, {"scale", p.coord_scale},
                           {"b", *p.b}, {"replicates", p.replicates}});
        stage("factorizing " + std::to_string(p.n * p.n) + "-pixel Gram matrix");
        csv = theorem2_csv(theorem2_experiment(p, seed), seed);
    } else if (a.experiment == "lemma3") {
        const auto ns = parse_list<std::size_t>(a.n_list.empty() ? "16,32" : a.n_list, "n");
        ctx.params.update({{"n", ns}, {"pairs", a.pairs}});
        csv = lemma3_csv(lemma3_experiment(ns, a.pairs, seed), seed);
    } else {
        usage_error("unknown --experiment '" + a.experiment + "' (concentration|consistency|theorem2|lemma3)");
    }
    fs::create_directories(ctx.out_dir());
    write_text(ctx.output(a.experiment + ".csv"), csv);
    std::cout << csv;
    ctx.write_manifest();
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Master seed")->default_val(0);
    sub->add_option("--threads", c.threads, "Worker thread cap (default: TEXSEG_THREADS or all cores)");
    sub->add_option("--out", c.out, "Output directory")->default_val(".");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Texture segmentation with patch autocovariance features"};
    app.require_subcommand(1);
    Common common;

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write a synthetic or image mosaic with its truth mask");
    g->add_option("--models", gen.models, "Comma list: ma1..ma4[:h], kernel:<variance>, or image paths")->required();
    g->add_option("--geom", gen.geom, "vsplit|hsplit|disk|quadrants|mask:<path>")->default_val("vsplit");
    g->add_option("--size", gen.size, "Mosaic side length")->default_val(128)->check(CLI::Range(2, 1 << 16));
    g->add_option("--radius", gen.radius, "Disk radius (default size/4)");
    g->add_option("--ma-half-width", gen.ma_half_width, "Moving-average half-width")->default_val(11);
    g->add_option("--kernel-scale", gen.kernel_scale, "Coordinate scale for kernel sources")->default_val(1.0);
    g->add_flag("--no-standardize", gen.no_standardize, "Keep raw texture values");
    add_common(g, common);

    FeatureArgs feat;
    auto* f = app.add_subcommand("features", "Dump per-pixel autocovariance features (TEXC)");
    f->add_option("--input", feat.input, "TEXF or PGM field")->required();
    f->add_option("--m", feat.m, "Patch half-width (default round(sqrt(rows)))");
    f->add_option("--padding", feat.padding, "reflect|wrap|shrink")->default_val("reflect");
    f->add_flag("--with-location", feat.with_location, "Append (row/n, col/n)");
    add_common(f, common);

    SegmentArgs seg;
    auto* s = app.add_subcommand("segment", "Segment a field");
    s->add_option("--input", seg.input, "TEXF or PGM field")->required();
    s->add_option("--algo", seg.algo, "kmeans|slink-threshold|slink-k|ward")->required();
    s->add_option("--k", seg.k, "Number of clusters");
    s->add_option("--m", seg.m, "Patch half-width (default round(sqrt(rows)))");
    s->add_flag("--with-location", seg.with_location, "Location-augmented features");
    s->add_option("--b", seg.b, "Single-linkage threshold");
    s->add_option("--beta", seg.beta, "Theoretical threshold exponent (used when --b is absent)");
    s->add_option("--min-size", seg.min_size, "Minimum cluster size (points clustered)")->default_val(0);
    s->add_option("--restarts", seg.restarts, "k-means restarts")->default_val(10);
    s->add_option("--max-iters", seg.max_iters, "k-means iteration cap")->default_val(300);
    s->add_option("--stride", seg.stride, "Pixel sampling step for slink-k and ward")->default_val(8);
    s->add_option("--padding", seg.padding, "reflect|wrap|shrink")->default_val("reflect");
    s->add_option("--metric", seg.metric, "linf|l2 feature metric for single linkage")->default_val("linf");
    s->add_option("--truth", seg.truth, "Truth mask PGM; prints matched accuracy");
    add_common(s, common);

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "Permutation-matched accuracy of a label map");
    e->add_option("--labels", ev.labels, "Estimated label PGM")->required();
    e->add_option("--truth", ev.truth, "Truth label PGM")->required();
    e->add_option("--k", ev.k, "Label count (default: max over both maps)");
    add_common(e, common);

    ReproduceArgs rp;
    auto* r = app.add_subcommand("reproduce", "Accuracy tables (1 synthetic, 2-4 from Brodatz images)");
    r->add_option("--table", rp.table, "1|2|3|4")->required()->check(CLI::Range(1, 4));
    r->add_option("--brodatz-dir", rp.brodatz_dir, "Directory holding D4.pgm ... D77.pgm");
    r->add_option("--size", rp.size, "Mosaic side (default 128 for table 1, 160 otherwise)");
    r->add_option("--seeds", rp.seeds, "Comma list of seeds (default: --seed)");
    r->add_option("--m", rp.m, "Patch half-width")->default_val(11);
    r->add_option("--ma-half-width", rp.ma_half_width, "Moving-average half-width for table 1")->default_val(11);
    r->add_option("--restarts", rp.restarts, "k-means restarts")->default_val(5);
    r->add_option("--stride", rp.stride, "Pixel sampling step for the linkage methods")->default_val(8);
    r->add_option("--min-fraction", rp.min_fraction, "Minimum cluster size as a fraction of points")->default_val(0.1);
    r->add_flag("--no-location", rp.no_location, "Drop the location features");
    add_common(r, common);

    TheoryArgs th;
    auto* t = app.add_subcommand("theory", "Monte-Carlo checks of the consistency theory");
    t->add_option("--experiment", th.experiment, "concentration|consistency|theorem2|lemma3")->required();
    t->add_option("--n", th.n_list, "Comma list of image sizes");
    t->add_option("--replicates", th.replicates, "Replicates per size");
    t->add_option("--a", th.a, "Deviation level for concentration")->default_val(0.3);
    t->add_option("--model", th.model, "Model for concentration")->default_val("ma3");
    t->add_option("--model0", th.model0, "First model for consistency")->default_val("ma1");
    t->add_option("--model1", th.model1, "Second model")->default_val("ma2");
    t->add_option("--ma-half-width", th.ma_half_width, "Moving-average half-width")->default_val(1);
    t->add_option("--b", th.b, "Threshold for theorem2 (default 0.8)");
    t->add_option("--beta", th.beta, "Envelope / threshold exponent")->default_val(1.5);
    t->add_option("--scale", th.scale, "Coordinate scale for theorem2 kernel covariance")->default_val(5.0);
    t->add_option("--sigma0", th.sigma0, "Kernel variance, left region")->default_val(1.0);
    t->add_option("--sigma1", th.sigma1, "Kernel variance, right region")->default_val(9.0);
    t->add_option("--pairs", th.pairs, "Pixel pairs for lemma3")->default_val(200);
    add_common(t, common);

    RunContext ctx;
    for (int i = 0; i < argc; ++i) ctx.argv.emplace_back(argv[i]);
    try {
        app.parse(argc, argv);
        set_thread_count(common.threads);
        ctx.common = common;
        if (*g) ctx.command = "generate", cmd_generate(ctx, gen);
        else if (*f) ctx.command = "features", cmd_features(ctx, feat);
        else if (*s) ctx.command = "segment", cmd_segment(ctx, seg);
        else if (*e) ctx.command = "evaluate", cmd_evaluate(ctx, ev);
        else if (*r) ctx.command = "reproduce", cmd_reproduce(ctx, rp);
        else if (*t) ctx.command = "theory", cmd_theory(ctx, th);
    } catch (const CLI::CallForHelp& h) {
        return app.exit(h);
    } catch (const CLI::CallForAllHelp& h) {
        return app.exit(h);
    } catch (const CLI::Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}

// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "texseg/texseg.hpp"

using namespace texseg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) { return format_fixed(v, digits); }

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / "texseg_acceptance" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(TEXSEG_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// --- AC1 ------------------------------------------------------------------

Outcome table_one() {
    const auto t0 = Clock::now();
    ReproduceOptions opt;
    opt.table = 1;
    opt.seeds = {1, 2, 3, 4, 5};
    const AccuracyTable t = reproduce_table(opt);
    const double secs = seconds_since(t0);
    std::printf("%s", table_csv(t, "1,2,3,4,5").c_str());
    const bool ok = t.mean.kmeans >= 0.95 && t.mean.ward_linkage >= 0.90 && t.mean.single_linkage >= 0.70 &&
                    secs <= 600.0;
    return {ok, "kmeans=" + fmt(t.mean.kmeans) + " ward=" + fmt(t.mean.ward_linkage) +
                    " single=" + fmt(t.mean.single_linkage) + " time=" + fmt(secs, 1) + "s"};
}

// --- AC2 ------------------------------------------------------------------

Outcome concentration() {
    const std::vector<std::size_t> ns{36, 64, 100, 144};
    const auto rows = concentration_experiment(MAModel{MAVariant::AlongRow, 1}, ns, 0.3, 300, Seed{0});
    bool monotone = true;
    std::string detail = "freq";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail += " n" + std::to_string(rows[i].n) + "=" + fmt(rows[i].frequency);
        if (i > 0 && rows[i].frequency > rows[i - 1].frequency) monotone = false;
    }
    const bool halved = rows.back().frequency <= 0.5 * rows.front().frequency;
    return {monotone && halved, detail};
}

// --- AC3 ------------------------------------------------------------------

Outcome consistency() {
    const auto t0 = Clock::now();
    ConsistencyParams p;
    p.replicates = 20;
    const ConsistencyReport rep =
        consistency_experiment(MAModel{MAVariant::Diagonal, 1}, MAModel{MAVariant::AntiDiagonal, 1}, {36, 144}, p, Seed{0});
    const double secs = seconds_since(t0);
    const double e36 = rep.rows[0].mean_error, e144 = rep.rows[1].mean_error;
    return {e144 < e36 && secs <= 300.0,
            "error n36=" + fmt(e36) + " n144=" + fmt(e144) + " time=" + fmt(secs, 1) + "s"};
}

// --- AC4 ------------------------------------------------------------------

Outcome threshold_linkage() {
    Theorem2Params p;
    p.n = 49;
    p.coord_scale = 5.0;
    p.b = 0.8;
    p.replicates = 10;
    const Theorem2Report rep = theorem2_experiment(p, Seed{0});
    return {rep.mean_fraction >= 0.95, "mean_fraction=" + fmt(rep.mean_fraction) + " min=" + fmt(rep.min_fraction) +
                                           " b=" + fmt(rep.b, 2) + " m=" + std::to_string(rep.m)};
}

// --- AC5 ------------------------------------------------------------------

// Empirical E[X(c) X(c+i)] from 10^5 independent small fields, compared at every lag |i| <= 2h.
Outcome ma_monte_carlo() {
    const int reps = 100000;
    double worst = 0.0;
    std::string where;
    for (int number = 1; number <= 4; ++number)
        for (int h = 1; h <= 2; ++h) {
            const MAModel model{variant_from_number(number), h};
            const long L = 2 * h, side = 2 * L + 1;
            std::vector<double> sums(static_cast<std::size_t>(side * side), 0.0);
            for (int r = 0; r < reps; ++r) {
                const Field x = sample_ma_field(model, side, side, derive_seed(Seed{static_cast<std::uint64_t>(r)}, 10 * number + h));
                const double centre = x(L, L);
                for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += centre * x[j];
            }
            for (long i1 = -L; i1 <= L; ++i1)
                for (long i2 = -L; i2 <= L; ++i2) {
                    const double est = sums[static_cast<std::size_t>((L + i1) * side + (L + i2))] / reps;
                    const double dev = std::abs(est - ma_true_autocov(model, i1, i2));
                    if (dev > worst) {
                        worst = dev;
                        where = "model " + std::to_string(number) + " h=" + std::to_string(h) + " lag (" +
                                std::to_string(i1) + "," + std::to_string(i2) + ")";
                    }
                }
        }
    return {worst <= 0.02, "max_dev=" + fmt(worst) + " at " + where};
}

Outcome gram_spectrum() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.2, 4.0), corr(-0.95, 0.95);
    double lowest = std::numeric_limits<double>::infinity();
    std::size_t matrices = 0;
    for (std::size_t n = 2; n <= 16; n += 2)
        for (int trial = 0; trial < 3; ++trial) {
            KernelSizeField sizes(n, n);
            for (auto& s : sizes.values()) {
                const double a = u(rng), d = u(rng), b = corr(rng) * std::sqrt(a * d);
                s = {a, b, b, d};
            }
            const KernelSizeField smooth = linear_sizes(n, 3.0 * trial);
            for (const KernelSizeField* f : {static_cast<const KernelSizeField*>(&sizes), &smooth})
                for (double scale : {1.0 / static_cast<double>(n), 0.3, 1.0, 5.0}) {
                    const Eigen::MatrixXd g = assemble_kernel_gram(*f, scale);
                    const double ev =
                        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
                    lowest = std::min(lowest, ev);
                    ++matrices;
                }
        }
    std::ostringstream d;
    d << "matrices=" << matrices << " min_eigenvalue=" << lowest;
    return {lowest >= -1e-8, d.str()};
}

double sse_of(const PointSet& ps, const std::vector<std::size_t>& idx) {
    if (idx.empty()) return 0.0;
    std::vector<double> mean(ps.dim(), 0.0);
    for (std::size_t i : idx)
        for (std::size_t j = 0; j < ps.dim(); ++j) mean[j] += ps[i][j] / static_cast<double>(idx.size());
    double s = 0.0;
    for (std::size_t i : idx)
        for (std::size_t j = 0; j < ps.dim(); ++j) s += (ps[i][j] - mean[j]) * (ps[i][j] - mean[j]);
    return s;
}

Outcome kmeans_exhaustive() {
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> g(0.0, 1.0);
    std::size_t hits = 0;
    for (int rep = 0; rep < 100; ++rep) {
        PointSet ps(12, 2);
        for (double& v : ps.data()) v = g(rng);
        double best = std::numeric_limits<double>::infinity();
        for (std::uint32_t mask = 1; mask < (1u << 11); ++mask) {
            std::vector<std::size_t> a{0}, b;
            for (std::size_t i = 1; i < 12; ++i) ((mask >> (i - 1)) & 1u ? b : a).push_back(i);
            best = std::min(best, sse_of(ps, a) + sse_of(ps, b));
        }
        const ClusterResult r = kmeans(ps, {.k = 2, .restarts = 50, .seed = Seed{static_cast<std::uint64_t>(rep)}});
        if (std::abs(r.objective_sq_euclid - best) <= 1e-9 * std::max(1.0, best)) ++hits;
    }
    return {hits == 100, std::to_string(hits) + "/100 instances optimal"};
}

Outcome permutation_match() {
    std::mt19937_64 rng(99);
    std::size_t agree = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t k = 2 + rep % 5, len = 50 + static_cast<std::size_t>(rep) * 7;
        std::uniform_int_distribution<std::uint32_t> lab(0, static_cast<std::uint32_t>(k - 1));
        std::vector<std::uint32_t> truth(len), est(len);
        for (std::size_t i = 0; i < len; ++i) {
            truth[i] = lab(rng);
            est[i] = rng() % 3 == 0 ? lab(rng) : (truth[i] + rep) % k;
        }
        std::vector<std::uint32_t> perm(k);
        std::iota(perm.begin(), perm.end(), 0u);
        std::size_t best = 0;
        do {
            std::size_t matched = 0;
            for (std::size_t i = 0; i < len; ++i) matched += perm[est[i]] == truth[i];
            best = std::max(best, matched);
        } while (std::next_permutation(perm.begin(), perm.end()));
        const MatchReport m = best_permutation_match(est, truth, k);
        std::size_t via_perm = 0;
        for (std::size_t i = 0; i < len; ++i) via_perm += m.permutation[est[i]] == truth[i];
        if (via_perm == best && m.total - m.mismatched_count == best &&
            m.accuracy == static_cast<double>(best) / static_cast<double>(len))
            ++agree;
    }
    return {agree == 100, std::to_string(agree) + "/100 instances agree"};
}

// --- AC6 / AC7 --------------------------------------------------------------

// Stand-in textures for the image tables: distinct MA textures saved as 8-bit PGM.
fs::path write_stand_in_images() {
    const fs::path dir = scratch("images");
    const auto& names = brodatz_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const MAModel model{variant_from_number(static_cast<int>(i % 4) + 1), 2 + 4 * static_cast<int>(i / 4)};
        const Field x = sample_ma_field(model, 200, 200, Seed{500 + i});
        detail::write_file(dir / (std::string(names[i]) + ".pgm"), encode_pgm_p5(field_to_preview(x)));
    }
    return dir;
}

// Runs one CLI invocation twice into separate directories and compares the named outputs.
bool same_twice(const std::string& args, const std::vector<std::string>& outputs, const std::string& tag,
                std::string& detail) {
    const fs::path a = scratch("det_" + tag + "_a"), b = scratch("det_" + tag + "_b");
    if (run_cli(args + " --out " + a.string(), a / "log.txt") != 0 ||
        run_cli(args + " --out " + b.string(), b / "log.txt") != 0) {
        detail += " " + tag + ":failed";
        return false;
    }
    for (const std::string& f : outputs) {
        if (!fs::exists(a / f) || slurp(a / f) != slurp(b / f)) {
            detail += " " + tag + ":" + f + "-differs";
            return false;
        }
    }
    return true;
}

Outcome determinism(const fs::path& images) {
    const fs::path src = scratch("det_src");
    if (run_cli("generate --models ma3,ma4 --size 48 --ma-half-width 2 --seed 5 --out " + src.string(), src / "log.txt") != 0)
        return {false, "generate failed"};
    const std::string texf = (src / "mosaic.texf").string(), truth = (src / "truth.pgm").string();
    std::string detail;
    std::size_t ok = 0, total = 0;
    const auto check = [&](const std::string& args, std::vector<std::string> outs, const std::string& tag) {
        ++total;
        ok += same_twice(args, outs, tag, detail);
    };
    check("generate --models ma1,ma2,ma3,ma4 --geom quadrants --size 40 --seed 3", {"mosaic.texf", "mosaic.pgm", "truth.pgm"},
          "generate");
    check("generate --models kernel:1,kernel:9 --size 24 --seed 3", {"mosaic.texf", "truth.pgm"}, "generate-kernel");
    check("features --input " + texf + " --m 3 --with-location", {"features.texc"}, "features");
    for (const char* algo : {"kmeans", "slink-k", "ward"})
        check("segment --input " + texf + " --algo " + algo + " --k 2 --m 4 --stride 4 --seed 9 --truth " + truth,
              {"labels.pgm", "labels.csv", "result.csv"}, std::string("segment-") + algo);
    check("segment --input " + texf + " --algo slink-threshold --m 3 --b 2.0", {"labels.csv", "result.csv"},
          "segment-threshold");
    check("evaluate --labels " + truth + " --truth " + truth + " --k 2", {"match.csv"}, "evaluate");
    check("reproduce --table 1 --size 48 --m 4 --ma-half-width 2 --restarts 2 --stride 4 --seeds 1,2", {"table1.csv"},
          "reproduce-1");
    check("reproduce --table 3 --size 64 --m 5 --restarts 2 --stride 4 --brodatz-dir " + images.string(), {"table3.csv"},
          "reproduce-3");
    check("theory --experiment concentration --n 16,25 --replicates 20 --seed 4", {"concentration.csv"}, "concentration");
    check("theory --experiment consistency --n 16,25 --replicates 2 --seed 4", {"consistency.csv"}, "consistency");
    check("theory --experiment theorem2 --n 16 --replicates 2 --seed 4", {"theorem2.csv"}, "theorem2");
    check("theory --experiment lemma3 --n 16 --pairs 30 --seed 4", {"lemma3.csv"}, "lemma3");
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " commands byte-identical" + detail};
}

Outcome image_tables(const fs::path& images) {
    std::string detail;
    bool ok = true;
    const std::size_t expected_rows[] = {0, 0, 3, 3, 3};
    for (int table = 2; table <= 4; ++table) {
        const fs::path out = scratch("table" + std::to_string(table));
        const int code = run_cli("reproduce --table " + std::to_string(table) + " --brodatz-dir " + images.string() +
                                     " --seed 1 --out " + out.string(),
                                 out / "log.txt");
        const std::string csv = slurp(out / ("table" + std::to_string(table) + ".csv"));
        const bool header = csv.rfind("mosaic,single_linkage,ward_linkage,kmeans\n", 0) == 0;
        const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
        const auto mean_at = csv.find("Mean Value,");
        const bool shaped = code == 0 && header && lines == expected_rows[table] + 3 && mean_at != std::string::npos;
        ok = ok && shaped;
        detail += " table" + std::to_string(table) + "=";
        if (!shaped) {
            detail += "bad-output";
            continue;
        }
        const std::string mean = csv.substr(mean_at, csv.find('\n', mean_at) - mean_at);
        detail += "[" + mean.substr(mean.find(',') + 1) + "]";
    }
    return {ok, "stand-in textures, accuracy reported only (single,ward,kmeans):" + detail};
}

}  // namespace

int main() {
    const fs::path images = write_stand_in_images();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 table-1 accuracy and runtime", table_one},
        {"AC2 autocovariance concentration", concentration},
        {"AC3 k-means error decreases with n", consistency},
        {"AC4 threshold single-linkage covered-set accuracy", threshold_linkage},
        {"AC5a moving-average autocovariance vs Monte-Carlo", ma_monte_carlo},
        {"AC5b kernel Gram spectrum", gram_spectrum},
        {"AC5c k-means vs exhaustive optimum", kmeans_exhaustive},
        {"AC5d permutation match vs brute force", permutation_match},
        {"AC6 CLI determinism", [&] { return determinism(images); }},
        {"AC7 image tables end to end", [&] { return image_tables(images); }},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

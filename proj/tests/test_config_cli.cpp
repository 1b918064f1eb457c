#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stpinn/cli.hpp"
#include "stpinn/config.hpp"
#include "stpinn/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace stpinn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "stpinn_test_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string config_error(std::string_view text) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

// Small, fast run in `dir`.
fs::path tiny_config(const fs::path& dir, const std::string& extra = "", const std::string& problem = "heat",
                     int epochs = 3, int neurons = 4) {
    const fs::path cfg = dir / "run.cfg";
    write(cfg, "PROBLEM = \"" + problem + "\"\nN_POINTS = 3\nN_POINTS_PLOT = 5\nLAYERS = 1\n" +
                   "NEURONS_PER_LAYER = " + std::to_string(neurons) + "\nEPOCHS = " + std::to_string(epochs) +
                   "\nREPORT_EVERY = 1\nOUTPUT_DIR = \"" + (dir / "out").string() + "\"\n" + extra);
    return cfg;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    args.insert(args.begin(), "stpinn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(int(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

} // namespace

TEST_CASE("a config only has to name the problem") {
    const RunConfig c = parse_config("PROBLEM = \"wave\"\n");
    CHECK(c == RunConfig::defaults_for("wave"));
    CHECK(c.length == 2.0);
    CHECK(c.total_time == 0.5);
    CHECK(c.layers == 10);
    CHECK(c.neurons == 120);
    CHECK(c.weights == LossWeights{0.03, 1.0, 0.0005});
    CHECK(c.epochs == 150000);
    CHECK(c.learning_rate == 0.00015);
    CHECK(c.coefficients.gravity == 9.81);
    CHECK(parse_config("PROBLEM = \"tumor\"").n_points == 20);
    CHECK(parse_config("PROBLEM = \"thermal_inversion\"").weights == LossWeights{20.0, 1.0, 10.0});
}

TEST_CASE("literal forms") {
    const RunConfig c = parse_config(R"(
# leading comment
problem = heat   # bare value, lower-case key
Length = 2.
TOTAL_TIME = .5
EPOCHS = 150_000
learning_rate = 1e-3
SEED = +7
OUTPUT_DIR = "runs # not a comment"
)");
    CHECK(c.problem == "heat");
    CHECK(c.length == 2.0);
    CHECK(c.total_time == 0.5);
    CHECK(c.epochs == 150000);
    CHECK(c.learning_rate == 1e-3);
    CHECK(c.seed == 7);
    CHECK(c.output_dir == "runs # not a comment");
}

TEST_CASE("coefficients at top level or in the problem's table") {
    CHECK(parse_config("PROBLEM = \"wave\"\nGRAVITY=1.62\n").coefficients.gravity == 1.62);
    CHECK(parse_config("PROBLEM = \"wave\"\n[wave]\nGRAVITY = 3.7\n").coefficients.gravity == 3.7);
    const RunConfig t = parse_config("PROBLEM = \"thermal_inversion\"\n[thermal_inversion]\nKX = 0.2\nKY = 0.02\n"
                                     "[tumor]\nRHO = 1.0\n");
    CHECK(t.coefficients.kx == 0.2);
    CHECK(t.coefficients.ky == 0.02);
    CHECK(t.coefficients.rho == ProblemCoefficients{}.rho);
    CHECK(parse_config("PROBLEM = \"heat\"\nEPSILON = 0.5").problem_spec().name == "heat");
}

TEST_CASE("errors name the offending field") {
    CHECK(config_error("LENGTH = 1").find("PROBLEM") != std::string::npos);
    CHECK(config_error("PROBLEM = \"burgers\"").find("PROBLEM") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nLEARNING_RATE = -1").find("LEARNING_RATE") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nLEARNING_RATE = fast").find("LEARNING_RATE") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nEPOCHS = 1.5").find("EPOCHS") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nEPOCHS = 1__0").find("EPOCHS") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nEPOCHS = -3").find("EPOCHS") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nLENGTH = +-3").find("LENGTH") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nN_POINTS = 1").find("N_POINTS") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nLAYERS = 0").find("LAYERS") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nACTIVATION = relu").find("ACTIVATION") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nWEIGHT_BOUNDARY = -1").find("WEIGHT_BOUNDARY") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nWEIGHT_RESIDUAL = 0\nWEIGHT_INITIAL = 0\nWEIGHT_BOUNDARY = 0") != "");
    CHECK(config_error("PROBLEM = \"heat\"\nNEURONS = 3").find("NEURONS") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nGRAVITY = 3").find("GRAVITY") != std::string::npos);
    CHECK(config_error("PROBLEM = \"wave\"\n[wave]\nRHO = 3").find("RHO") != std::string::npos);
    CHECK(config_error("PROBLEM = \"wave\"\n[ocean]\n") != "");
    CHECK(config_error("PROBLEM = \"wave\"\nGRAVITY = 1\n[wave]\nGRAVITY = 2").find("GRAVITY") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\nEPOCHS = 1\nepochs = 2").find("EPOCHS") != std::string::npos);
    CHECK(config_error("PROBLEM = \"heat\"\njust some words") != "");
    CHECK(config_error("PROBLEM = \"tumor\"\nRHO = 0").find("RHO") != std::string::npos);
}

TEST_CASE("serialize then parse is the identity") {
    for (const char* name : {"heat", "wave", "thermal_inversion", "tumor"}) {
        RunConfig c = RunConfig::defaults_for(name);
        c.seed = 12345678901234ULL;
        c.learning_rate = 0.1 + 0.2;
        c.stop_loss = 1e-7;
        c.sampling = SamplingMode::uniform_random;
        c.activation = Activation::sigmoid;
        c.mode = TrainMode::sgd_sketch;
        c.output_dir = "a dir/with spaces";
        c.coefficients.kx = 0.3;
        c.coefficients.rho = 0.05;
        c.coefficients.gravity = 1.5;
        c.coefficients.epsilon = 0.25;
        const RunConfig back = parse_config(serialize_config(c));
        CAPTURE(name);
        // only the selected problem's coefficients survive
        ProblemCoefficients expect;
        const std::string n = name;
        if (n == "heat") expect.epsilon = 0.25;
        if (n == "wave") expect.gravity = 1.5;
        if (n == "thermal_inversion") expect.kx = 0.3;
        if (n == "tumor") expect.rho = 0.05;
        c.coefficients = expect;
        CHECK(back == c);
    }
}

TEST_CASE("PINN_SEED overrides the seed") {
    RunConfig c = RunConfig::defaults_for("heat");
    ::setenv("PINN_SEED", "42", 1);
    apply_env_overrides(c);
    CHECK(c.seed == 42);
    ::setenv("PINN_SEED", "-1", 1);
    CHECK_THROWS_AS(apply_env_overrides(c), ConfigError);
    ::setenv("PINN_SEED", "12x", 1);
    CHECK_THROWS_AS(apply_env_overrides(c), ConfigError);
    ::unsetenv("PINN_SEED");
    apply_env_overrides(c);
    CHECK(c.seed == 42);
}

TEST_CASE("shipped configs reproduce the problem defaults") {
    const fs::path dir = fs::path(STPINN_SOURCE_DIR) / "configs";
    const std::pair<const char*, const char*> files[] = {
        {"heat.cfg", "heat"}, {"wave.cfg", "wave"}, {"thermal.cfg", "thermal_inversion"}, {"tumor.cfg", "tumor"}};
    for (const auto& [file, problem] : files) {
        CAPTURE(file);
        CHECK(load_config(dir / file) == RunConfig::defaults_for(problem));
    }
    CHECK_THROWS_AS(load_config(dir / "missing.cfg"), IoError);
}

TEST_CASE("train writes the run artefacts") {
    const fs::path dir = scratch("train");
    std::string out;
    REQUIRE(cli({"train", "--config", tiny_config(dir).string()}, &out) == exit_ok);
    CHECK(out.find("Epoch: 1 - Loss: ") == 0);
    CHECK(out.find("Epoch: 3 - Loss: ") != std::string::npos);
    const fs::path o = dir / "out";
    for (const char* f : {"convergence.csv", "model.ckpt", "summary.json", "config.cfg"})
        CHECK(fs::exists(o / f));
    const auto summary = nlohmann::json::parse(slurp(o / "summary.json"));
    CHECK(summary["status"] == "completed");
    CHECK(summary["epochs_run"] == 3);
    CHECK(summary["parameters"] == 4 * 3 + 4 + 4 + 1);
    CHECK(load_config(o / "config.cfg") == load_config(dir / "run.cfg"));
    const std::string csv = slurp(o / "convergence.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("zero epochs gives a header-only convergence file") {
    const fs::path dir = scratch("zero");
    const fs::path cfg = dir / "zero.cfg";
    write(cfg, "PROBLEM = \"heat\"\nEPOCHS = 0\nLAYERS = 1\nNEURONS_PER_LAYER = 2\n");
    REQUIRE(cli({"train", "--config", cfg.string(), "--out", (dir / "o").string()}) == exit_ok);
    CHECK(slurp(dir / "o" / "convergence.csv") == "epoch,total,residual,initial,boundary\n");
    CHECK(fs::exists(dir / "o" / "model.ckpt"));
}

TEST_CASE("train output is reproducible") {
    const fs::path a = scratch("rep_a");
    const fs::path b = scratch("rep_b");
    REQUIRE(cli({"train", "--config", tiny_config(a).string()}) == exit_ok);
    REQUIRE(cli({"train", "--config", tiny_config(b).string()}) == exit_ok);
    CHECK(slurp(a / "out" / "convergence.csv") == slurp(b / "out" / "convergence.csv"));
    CHECK(slurp(a / "out" / "model.ckpt") == slurp(b / "out" / "model.ckpt"));
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch("codes");
    std::string err;
    write(dir / "bad.cfg", "PROBLEM = \"burgers\"\n");
    CHECK(cli({"train", "--config", (dir / "bad.cfg").string()}, nullptr, &err) == exit_usage);
    CHECK(err.find("PROBLEM") != std::string::npos);
    CHECK(cli({"train", "--config", (dir / "nope.cfg").string()}) == exit_io);
    CHECK(cli({"train"}) == exit_usage);
    CHECK(cli({"fly"}) == exit_usage);
    CHECK(cli({}) == exit_usage);
    CHECK(cli({"train", "--config", tiny_config(scratch("codes_key"), "COLOUR = 1\n").string()}) == exit_usage);
    std::string help;
    CHECK(cli({"--help"}, &help) == exit_ok);
    CHECK(help.find("train") != std::string::npos);

    const fs::path cfg = tiny_config(dir);
    REQUIRE(cli({"train", "--config", cfg.string()}) == exit_ok);
    const std::string ckpt = (dir / "out" / "model.ckpt").string();
    CHECK(cli({"evaluate", "--checkpoint", (dir / "none.ckpt").string(), "--config", cfg.string()}) == exit_io);
    CHECK(cli({"frames", "--checkpoint", ckpt, "--config", cfg.string(), "--dt", "0"}) == exit_usage);
    CHECK(cli({"frames", "--checkpoint", ckpt, "--config", cfg.string(), "--dt", "-0.1"}) == exit_usage);
    CHECK(cli({"snapshot", "--checkpoint", ckpt, "--config", cfg.string(), "--t", "2"}) == exit_usage);

    // checkpoint shape differs from the config
    const fs::path wide = tiny_config(scratch("codes_wide"), "", "heat", 3, 5);
    CHECK(cli({"evaluate", "--checkpoint", ckpt, "--config", wide.string()}, nullptr, &err) == exit_usage);

    // diverging run: no checkpoint, exit 2
    const fs::path div = scratch("codes_div");
    const fs::path dcfg = tiny_config(div, "LEARNING_RATE = 1e300\n", "tumor", 30);
    CHECK(cli({"train", "--config", dcfg.string()}) == exit_divergence);
    CHECK_FALSE(fs::exists(div / "out" / "model.ckpt"));
    const auto summary = nlohmann::json::parse(slurp(div / "out" / "summary.json"));
    CHECK(summary["status"] == "diverged");
}

TEST_CASE("evaluate a zero network against the exact heat solution") {
    const fs::path dir = scratch("eval");
    const fs::path cfg = tiny_config(dir);
    const Mlp zero = constant_network({1, 4, Activation::tanh, 0}, 0.0);
    save_checkpoint(zero, dir / "zero.ckpt");
    REQUIRE(cli({"evaluate", "--checkpoint", (dir / "zero.ckpt").string(), "--config", cfg.string()}) == exit_ok);
    const auto m = nlohmann::json::parse(slurp(dir / "out" / "metrics.json"));
    CHECK(m["fresh_grid_points"] == 5);
    CHECK(m["error"]["per_time"][0]["t"] == 0.0);
    CHECK(m["error"]["per_time"][0]["rel_l2"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m["error"]["rel_l2"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    // zero field: residual and boundary losses vanish, initial loss is the mean of u0^2
    CHECK(m["loss"]["residual"] == 0.0);
    CHECK(m["loss"]["boundary"] == 0.0);
    CHECK(m["loss"]["initial"].get<double>() == doctest::Approx(4.0 / 25.0).epsilon(1e-12));
}

TEST_CASE("snapshot and frames") {
    const fs::path dir = scratch("frames");
    const fs::path cfg = tiny_config(dir);
    REQUIRE(cli({"train", "--config", cfg.string()}) == exit_ok);
    const std::string ckpt = (dir / "out" / "model.ckpt").string();
    REQUIRE(cli({"evaluate", "--checkpoint", ckpt, "--config", cfg.string()}) == exit_ok);
    const auto m = nlohmann::json::parse(slurp(dir / "out" / "metrics.json"));
    for (const char* k : {"total", "residual", "initial", "boundary"}) CHECK(std::isfinite(m["loss"][k].get<double>()));
    for (const char* k : {"mse", "max_abs", "rel_l2"}) CHECK(std::isfinite(m["error"][k].get<double>()));
    REQUIRE(cli({"snapshot", "--checkpoint", ckpt, "--config", cfg.string(), "--t", "0.5"}) == exit_ok);
    CHECK(fs::exists(dir / "out" / "snapshot_t0.5000.csv"));
    CHECK(fs::exists(dir / "out" / "snapshot_t0.5000.png"));
    REQUIRE(cli({"frames", "--checkpoint", ckpt, "--config", cfg.string(), "--dt", "0.25", "--out",
                 (dir / "alt").string()}) == exit_ok);
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir / "alt" / "frames")) n += e.path().extension() == ".png";
    CHECK(n == 4);
    CHECK(fs::exists(dir / "alt" / "frames" / "img_003.csv"));
}

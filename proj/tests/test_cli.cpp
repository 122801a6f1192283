// End-to-end checks of the dfwm binary: exit codes, file outputs,
// reproducibility and the control-on/off comparison contract.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::stringstream ss;
    ss << std::ifstream(p).rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const std::string& tag) {
    const fs::path out = fs::temp_directory_path() / ("dfwm_cli_" + tag + ".out");
    const fs::path err = fs::temp_directory_path() / ("dfwm_cli_" + tag + ".err");
    const std::string cmd = std::string(DFWM_CLI_PATH) + " " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string write_temp(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p.string();
}

}  // namespace

TEST_CASE("spectrum command writes spectra and a JSON summary") {
    const fs::path out = fresh_dir("dfwm_t_spectrum");
    const RunResult r = run_cli("spectrum --preset fig1b --omega1-span 120MHz --points 241 --out " +
                                    out.string(),
                                "spectrum");
    REQUIRE(r.exit_code == 0);
    for (const char* f : {"spectrum_avg_chi1.csv", "spectrum_avg_chi4nl.csv",
                          "spectrum_avg_chi4nl_sq.csv", "spectrum_surface.csv",
                          "spectrum_summary.json"})
        CHECK(fs::exists(out / f));
    const json j = json::parse(r.out);
    CHECK(j["command"] == "spectrum");
    CHECK(j["metrics"]["chi4nl"].contains("hwhm_mhz"));
    CHECK(j["omega1_span_mhz"].get<double>() == Catch::Approx(120.0));
    // provenance header on every CSV
    const std::string csv = slurp(out / "spectrum_avg_chi4nl.csv");
    CHECK(csv.rfind("# dfwm spectrum", 0) == 0);
    CHECK(csv.find("detuning_MHz,re,im,abs2") != std::string::npos);
}

TEST_CASE("switching off the control broadens the averaged line at least fivefold") {
    const fs::path out_on = fresh_dir("dfwm_t_on");
    const fs::path out_off = fresh_dir("dfwm_t_off");
    const RunResult on =
        run_cli("spectrum --preset fig1b --points 801 --out " + out_on.string(), "on");
    const RunResult off = run_cli(
        "spectrum --preset fig1b --no-control --points 801 --out " + out_off.string(), "off");
    REQUIRE(on.exit_code == 0);
    REQUIRE(off.exit_code == 0);
    const double hwhm_on = json::parse(on.out)["metrics"]["chi4nl"]["hwhm_mhz"].get<double>();
    const double hwhm_off = json::parse(off.out)["metrics"]["chi4nl"]["hwhm_mhz"].get<double>();
    CHECK(hwhm_off >= 5.0 * hwhm_on);
    CHECK(json::parse(off.out)["metrics"]["chi4nl"]["guard_escalated"].get<bool>());
}

TEST_CASE("malformed scenario files exit with code 2 naming the offending key") {
    const std::string bad = write_temp("dfwm_cli_bad.toml",
                                       "scheme = \"na2\"\nfields = \"fig1b\"\nbogus_key = 1\n");
    const RunResult r = run_cli("spectrum --config " + bad, "badcfg");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("bogus_key") != std::string::npos);
    const RunResult r2 = run_cli("spectrum", "noscn");
    CHECK(r2.exit_code == 2);
}

TEST_CASE("design exits with code 4 when the geometry cannot compensate") {
    const std::string coprop = write_temp(
        "dfwm_cli_coprop.toml",
        "scheme = \"na2\"\n[fields.E2]\nrabi_mhz = 128.5\ndetuning_mhz = 92300.0\n"
        "[fields.E3minus]\ndetuning_mhz = 73200.0\ndirection = 1\n"
        "[fields.E3plus]\nrabi_mhz = 5.78\ndetuning_mhz = -7300.0\n");
    const RunResult r = run_cli("design --config " + coprop, "coprop");
    CHECK(r.exit_code == 4);
    CHECK(r.err.find("no compensation geometry") != std::string::npos);
}

TEST_CASE("design reproduces the caption control fields through the CLI") {
    const fs::path out = fresh_dir("dfwm_t_design");
    const RunResult r = run_cli("design --preset fig1b --out " + out.string(), "design1b");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["solved_rabi_mhz"].get<double>() == Catch::Approx(25.2e3).epsilon(0.2));
    CHECK(fs::exists(out / "design_report.json"));
    const json file = json::parse(slurp(out / "design_report.json"));
    CHECK(file["closed_form"]["iterations"].get<int>() <= 50);
    CHECK(file["refined"].contains("center_spread_mhz"));
}

TEST_CASE("convert with --zmax 0 emits a single zero-efficiency row") {
    const fs::path out = fresh_dir("dfwm_t_zmax0");
    const RunResult r = run_cli("convert --preset fig1b --zmax 0 --out " + out.string(), "zmax0");
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(out / "convert.csv");
    int data_rows = 0;
    std::stringstream ss(csv);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#' && line.find("alpha01_z") == std::string::npos)
            ++data_rows;
    CHECK(data_rows == 1);
    CHECK(csv.find("\n0,0,0,") != std::string::npos);
}

TEST_CASE("convert --compare-off reports an enhancement ratio above one") {
    const fs::path out = fresh_dir("dfwm_t_convert");
    const RunResult r = run_cli(
        "convert --preset fig1b --zmax 5 --nz 101 --compare-off --out " + out.string(), "conv1b");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["enhancement_ratio_closed"].get<double>() > 1.0);
    CHECK(j["enhancement_ratio_ode"].get<double>() > 1.0);
    CHECK(fs::exists(out / "convert.csv"));
    CHECK(fs::exists(out / "convert_off.csv"));
}

TEST_CASE("reruns are byte-identical") {
    const fs::path out1 = fresh_dir("dfwm_t_rep1");
    const fs::path out2 = fresh_dir("dfwm_t_rep2");
    const std::string args = "convert --preset fig1c --zmax 3 --nz 61 --out ";
    REQUIRE(run_cli(args + out1.string(), "rep1").exit_code == 0);
    REQUIRE(run_cli(args + out2.string(), "rep2").exit_code == 0);
    CHECK(slurp(out1 / "convert.csv") == slurp(out2 / "convert.csv"));
    CHECK(slurp(out1 / "convert_summary.json") == slurp(out2 / "convert_summary.json"));
}

TEST_CASE("unknown flags exit with a usage error") {
    const RunResult r = run_cli("spectrum --preset fig1b --frobnicate", "badflag");
    CHECK(r.exit_code == 2);
}

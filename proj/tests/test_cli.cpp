#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

// HORN_CLI_PATH is injected by the build for the compiled tool
namespace {

namespace fs = std::filesystem;

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::current_path() / "cli_scratch";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    const fs::path out_p = scratch_dir() / "stdout.txt";
    const fs::path err_p = scratch_dir() / "stderr.txt";
    const std::string cmd = std::string("\"") + HORN_CLI_PATH + "\" " + args + " > \"" +
                            out_p.string() + "\" 2> \"" + err_p.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_p);
    r.err = slurp(err_p);
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream ss(text);
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

/// Cells of one named column, skipping the provenance and header lines.
std::vector<std::string> column(const fs::path& csv, const std::string& name) {
    const auto lines = lines_of(slurp(csv));
    REQUIRE(lines.size() >= 2);
    REQUIRE(lines[0].rfind("# seed=", 0) == 0);
    const auto header = split_csv(lines[1]);
    std::size_t idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) idx = i;
    REQUIRE(idx < header.size());
    std::vector<std::string> cells;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto row = split_csv(lines[i]);
        REQUIRE(row.size() == header.size());
        cells.push_back(row[idx]);
    }
    return cells;
}

std::vector<double> numeric_column(const fs::path& csv, const std::string& name) {
    std::vector<double> vals;
    for (const auto& cell : column(csv, name)) vals.push_back(std::stod(cell));
    return vals;
}

} // namespace

TEST_CASE("simulate writes the trajectory schema with a rising momentum column") {
    const fs::path csv = scratch_dir() / "t.csv";
    const RunResult r = run_cli(
        "simulate --r-plus 2 --r-minus 1 --theta0 0.3 --psi0 -0.05 --theta-max 0.3 --out \"" +
        csv.string() + "\"");
    CHECK(r.code == 0);
    CHECK(r.out.find("termination=escaped") != std::string::npos);

    const auto lines = lines_of(slurp(csv));
    REQUIRE(lines.size() > 4);
    CHECK(lines[0].rfind("# seed=12345 r_plus=2 r_minus=1", 0) == 0);
    CHECK(lines[1] == "n,t,wall,x,y,s_wall,s_mid,theta,vmx,vmy,vpx,vpy,v_dot_n,"
                      "L_minus,L_plus,delta_L,J");

    const auto L = numeric_column(csv, "L_plus");
    for (std::size_t i = 1; i < L.size(); ++i) CHECK(L[i] > L[i - 1]);
    const auto t = numeric_column(csv, "t");
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
}

TEST_CASE("equal radii are rejected as a config error") {
    const RunResult r = run_cli("simulate --r-plus 1 --r-minus 1");
    CHECK(r.code == 1);
    CHECK(r.err.find("r_plus must exceed r_minus") != std::string::npos);
}

TEST_CASE("svg figure contains both walls and the trajectory") {
    const fs::path csv = scratch_dir() / "fig.csv";
    const fs::path svg = scratch_dir() / "fig.svg";
    const RunResult r = run_cli("simulate --theta0 0.25 --psi0 -0.1 --out \"" + csv.string() +
                                "\" --svg \"" + svg.string() + "\"");
    CHECK(r.code == 0);
    const std::string body = slurp(svg);
    CHECK(body.rfind("<svg", 0) == 0);
    CHECK(body.find("id=\"outer-wall\"") != std::string::npos);
    CHECK(body.find("id=\"inner-wall\"") != std::string::npos);
    CHECK(body.find("id=\"trajectory\"") != std::string::npos);
    CHECK(body.find("polyline") != std::string::npos);
}

TEST_CASE("sweep is deterministic per seed and escapes everywhere") {
    const fs::path a = scratch_dir() / "s1.csv";
    const fs::path b = scratch_dir() / "s2.csv";
    const std::string flags = "sweep --samples 40 --seed 777 --max-collisions 100000 --out ";
    CHECK(run_cli(flags + "\"" + a.string() + "\"").code == 0);
    CHECK(run_cli(flags + "\"" + b.string() + "\"").code == 0);
    CHECK(slurp(a) == slurp(b));

    const auto lines = lines_of(slurp(a));
    REQUIRE(lines.size() == 42);
    CHECK(lines[1] == "i,theta0,psi0,termination,n_collisions,min_theta,j_drift");
    for (const auto& cell : column(a, "termination")) CHECK(cell == "escaped");

    const fs::path empty = scratch_dir() / "s0.csv";
    CHECK(run_cli("sweep --samples 0 --out \"" + empty.string() + "\"").code == 0);
    CHECK(lines_of(slurp(empty)).size() == 2);
}

TEST_CASE("momentum-bound margins pass on defaults, fail with excess slack") {
    const fs::path m = scratch_dir() / "margins.csv";
    const RunResult ok =
        run_cli("lemma-check --samples 20 --out \"" + m.string() + "\"");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("violations=0") != std::string::npos);
    const auto lines = lines_of(slurp(m));
    REQUIRE(lines.size() > 2);
    CHECK(lines[1] == "traj,event,wall,arc_s,theta,v_dot_n,delta_L,margin");
    for (double margin : numeric_column(m, "margin")) CHECK(margin > 0);

    // the actual gain runs at about twice the bound, so 1.5x slack still holds
    const RunResult mid =
        run_cli("lemma-check --samples 20 --relax 1.5 --out \"" + m.string() + "\"");
    CHECK(mid.code == 0);

    // 2.5x exceeds the true gain on every outer-wall event
    const RunResult bad =
        run_cli("lemma-check --samples 20 --relax 2.5 --out \"" + m.string() + "\"");
    CHECK(bad.code == 4);

    const fs::path none = scratch_dir() / "margins0.csv";
    CHECK(run_cli("lemma-check --samples 0 --out \"" + none.string() + "\"").code == 0);
    CHECK(lines_of(slurp(none)).size() == 2);
}

TEST_CASE("adiabatic drift decreases with entry depth") {
    const fs::path a = scratch_dir() / "adiabatic.csv";
    const RunResult r =
        run_cli("adiabatic --depths 0.2 0.1 0.05 --sdot0 -0.5 --max-collisions 200000 "
                "--out \"" + a.string() + "\"");
    CHECK(r.code == 0);
    const auto lines = lines_of(slurp(a));
    REQUIRE(lines.size() == 5);
    CHECK(lines[1] == "s0,j_drift,s_min,s_min_pred,n_collisions");

    const auto drift = numeric_column(a, "j_drift");
    REQUIRE(drift.size() == 3);
    CHECK(drift[0] > drift[1]);
    CHECK(drift[1] > drift[2]);

    const auto s_min = numeric_column(a, "s_min");
    const auto pred = numeric_column(a, "s_min_pred");
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::abs(s_min[i] - pred[i]) / pred[i] < 0.1);

    const fs::path one = scratch_dir() / "adiabatic1.csv";
    CHECK(run_cli("adiabatic --depths 0.1 --out \"" + one.string() + "\"").code == 0);
    CHECK(lines_of(slurp(one)).size() == 3);

    CHECK(run_cli("adiabatic --depths -0.1").code == 1);
    CHECK(run_cli("adiabatic --sdot0 0.5").code == 1);
}

TEST_CASE("ode excursion conserves the invariant and reports the turning depth") {
    const fs::path o = scratch_dir() / "ode.csv";
    const RunResult r = run_cli("ode --s0 0.1 --sdot0 -0.5 --dt 1e-4 --out \"" + o.string() +
                                "\"");
    CHECK(r.code == 0);
    const auto s = numeric_column(o, "s");
    const auto J = numeric_column(o, "J");
    REQUIRE(!s.empty());
    double min_s = s[0];
    for (double v : s) min_s = std::min(min_s, v);
    CHECK(min_s == doctest::Approx(0.093060).epsilon(1e-4));
    const double j0 = J[0];
    for (double v : J) CHECK(std::abs(v - j0) / j0 < 1e-7);

    CHECK(run_cli("ode --s0 0").code == 1);
    CHECK(run_cli("ode --s0 0.1 --sdot0 1.5").code == 1);

    // released from rest the coordinate can only grow
    const fs::path rest = scratch_dir() / "ode_rest.csv";
    CHECK(run_cli("ode --s0 0.1 --sdot0 0 --dt 1e-4 --t-end 0.05 --out \"" + rest.string() +
                  "\"").code == 0);
    const auto sr = numeric_column(rest, "s");
    REQUIRE(sr.size() > 10);
    CHECK(sr.back() > sr.front());
    for (std::size_t i = 1; i < sr.size(); ++i) CHECK(sr[i] >= sr[i - 1]);
}

TEST_CASE("config file values apply and flags override them") {
    const fs::path cfg = scratch_dir() / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "# ensemble settings\n";
        f << "samples = 3\n";
        f << "seed = 99\n";
    }
    const fs::path a = scratch_dir() / "cfg_a.csv";
    CHECK(run_cli("sweep --config \"" + cfg.string() + "\" --out \"" + a.string() + "\"")
              .code == 0);
    CHECK(lines_of(slurp(a)).size() == 5);
    CHECK(slurp(a).find("# seed=99") == 0);

    const fs::path b = scratch_dir() / "cfg_b.csv";
    CHECK(run_cli("sweep --config \"" + cfg.string() + "\" --samples 2 --out \"" +
                  b.string() + "\"")
              .code == 0);
    CHECK(lines_of(slurp(b)).size() == 4);

    const fs::path bad = scratch_dir() / "bad.cfg";
    {
        std::ofstream f(bad);
        f << "bogus = 1\n";
    }
    const RunResult r = run_cli("sweep --config \"" + bad.string() + "\"");
    CHECK(r.code == 1);
    CHECK(r.err.find("unknown config key: bogus") != std::string::npos);
}

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lglab/cli.hpp"

using namespace lglab;

namespace {
struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}
}  // namespace

TEST_CASE("analyze the three-equilibria set") {
    const Run r = run({"analyze", "--a", "0.5", "--b", "0.1", "--k1", "0.08", "--k2", "0.2", "--m", "0.0025"});
    REQUIRE(r.code == kExitOk);
    const Json j = Json::parse(r.out);
    REQUIRE(j["interior_equilibria"].size() == 3);
    CHECK(j["interior_equilibria"][0]["taxonomy"] == "StableFocus");
    CHECK(j["interior_equilibria"][1]["taxonomy"] == "Saddle");
    CHECK(j["interior_equilibria"][2]["taxonomy"] == "UnstableFocus");
    CHECK(j["index_check"]["sum"] == 1);
}

TEST_CASE("analyze reports the global stability certificate") {
    const Run r = run({"analyze", "--m", "0.5", "--k1", "0.2", "--a", "1", "--k2", "1", "--b", "0.5"});
    REQUIRE(r.code == kExitOk);
    const Json j = Json::parse(r.out);
    CHECK(j["count"]["n_predicted"] == 1);
    bool holds = false;
    for (const auto& c : j["certificates"])
        if (c["clause"] == "global_stability") holds = c["holds"];
    CHECK(holds);
}

TEST_CASE("raw parameters are rescaled") {
    {
        std::ofstream f("raw_ones.json");
        f << R"({"rho1":1,"rho2":1,"beta":1,"alpha1":1,"alpha2":1,"kappa1":1,"kappa2":1,"mu":0.3})";
    }
    const Run raw = run({"analyze", "--raw", "raw_ones.json"});
    const Run direct = run({"analyze", "--a", "1", "--b", "1", "--k1", "1", "--k2", "1", "--m", "0.3"});
    REQUIRE(raw.code == kExitOk);
    CHECK(Json::parse(raw.out)["interior_equilibria"] == Json::parse(direct.out)["interior_equilibria"]);
    CHECK(run({"analyze", "--raw", "raw_ones.json", "--a", "2"}).code == kExitInput);
}

TEST_CASE("input errors exit with 1") {
    CHECK(run({"analyze", "--a", "-1"}).code == kExitInput);
    CHECK(run({"analyze", "--m", "1"}).code == kExitInput);
    CHECK(run({"analyze", "--bogus"}).code == kExitInput);
    CHECK(run({"sde", "path", "--t-max", "1"}).code == kExitInput);  // missing seed
    CHECK(run({"ode", "--scheme", "midpoint"}).code == kExitInput);
    CHECK(run({"analyze", "--params", "does_not_exist.json"}).code == kExitInput);
    CHECK(run({"ode", "--h", "0"}).code == kExitInput);
    CHECK(run({"scan", "--scan", "q", "--from", "0", "--to", "1"}).code == kExitInput);
}

TEST_CASE("ode at E1 gives constant rows") {
    const Run r = run({"ode", "--x0", "1", "--y0", "0", "--t-max", "1", "--h", "0.1"});
    REQUIRE(r.code == kExitOk);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 12);
    CHECK(ls[0] == "t,x,y");
    for (std::size_t i = 1; i < ls.size(); ++i) CHECK(ls[i].substr(ls[i].find(',')) == ",1,0");
}

TEST_CASE("euler and rk4 agree on the stable equilibrium") {
    const std::vector<std::string> base{"ode", "--a", "0.4", "--b", "0.1", "--k1", "0.08", "--k2", "0.2",
                                        "--m", "0.0025", "--t-max", "500"};
    auto last = [](const Run& r) {
        const auto ls = lines(r.out);
        std::istringstream is(ls.back());
        std::string t, x, y;
        std::getline(is, t, ',');
        std::getline(is, x, ',');
        std::getline(is, y, ',');
        return std::pair{std::stod(x), std::stod(y)};
    };
    auto e_args = base, r_args = base;
    e_args.insert(e_args.end(), {"--scheme", "euler", "--h", "0.01"});
    r_args.insert(r_args.end(), {"--scheme", "rk4", "--h", "0.001"});
    const auto [ex, ey] = last(run(e_args));
    const auto [rx, ry] = last(run(r_args));
    CHECK(std::abs(ex - rx) < 1e-3);
    CHECK(std::abs(ey - ry) < 1e-3);
}

TEST_CASE("ode with cycle detection appends a cycle report") {
    const Run r = run({"ode", "--m", "0.01", "--a", "1", "--k1", "0.1", "--k2", "0.1", "--b", "0.05", "--x0", "0.3",
                       "--y0", "0.3", "--h", "0.01", "--t-max", "3000", "--burn-in", "1000", "--detect-cycle",
                       "--out", "traj.csv"});
    REQUIRE(r.code == kExitOk);
    const Json j = Json::parse(r.out);
    CHECK(j["kind"] == "cycle");
    CHECK(j["cycle"]["found"] == true);
    CHECK(j["cycle"]["stable"] == true);
    std::ifstream f("traj.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header == "t,x,y");
}

TEST_CASE("sde path is reproducible") {
    const std::vector<std::string> args{"sde", "path", "--sigma1", "0.01", "--sigma2", "0.01", "--seed", "42",
                                        "--t-max", "5", "--h", "0.01"};
    const Run a = run(args), b = run(args);
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
    auto other = args;
    other[7] = "43";
    CHECK(run(other).out != a.out);

    auto cmp = args;
    cmp.push_back("--comparison");
    const Run c = run(cmp);
    REQUIRE(c.code == kExitOk);
    CHECK(lines(c.out)[1].find(",,") == std::string::npos);
}

TEST_CASE("sde ensemble, stationary and hitting emit json") {
    Run r = run({"sde", "ensemble", "--sigma1", "0.1", "--sigma2", "0.1", "--seed", "1", "--paths", "4", "--t-max",
                 "2", "--h", "0.01", "--checkpoints", "0.5,1"});
    REQUIRE(r.code == kExitOk);
    Json j = Json::parse(r.out);
    CHECK(j["kind"] == "ensemble");
    CHECK(j["checkpoints"].size() == 3);

    r = run({"sde", "stationary", "--sigma1", "0.01", "--sigma2", "0.01", "--seed", "1", "--t-max", "30",
             "--burn-in", "10", "--h", "0.01"});
    REQUIRE(r.code == kExitOk);
    j = Json::parse(r.out);
    CHECK(j["regime"] == "Stationary");
    CHECK(j["regime_warning"] == false);

    r = run({"sde", "hitting", "--sigma1", "0.01", "--sigma2", "0.01", "--seed", "1", "--paths", "5", "--t-max",
             "50", "--x0", "0.001", "--target-x-lo", "0.00125"});
    REQUIRE(r.code == kExitOk);
    j = Json::parse(r.out);
    CHECK(j["kind"] == "hitting");
    CHECK(j["censored_fraction"] == 0.0);
}

TEST_CASE("config dump round trip") {
    const Run d = run({"sde", "ensemble", "--a", "0.45", "--seed", "9", "--paths", "7", "--dump-config"});
    REQUIRE(d.code == kExitOk);
    const RunConfig c = run_config_from_json(Json::parse(d.out));
    CHECK(c.command == "sde");
    CHECK(c.mode == "ensemble");
    CHECK(c.params.a == 0.45);
    CHECK(c.paths == 7);
    REQUIRE(c.seed);
    CHECK(*c.seed == 9);
    CHECK(run_config_from_json(to_json(c)) == c);

    {
        std::ofstream f("cfg.json");
        f << d.out;
    }
    const Run again = run({"sde", "ensemble", "--config", "cfg.json", "--dump-config"});
    CHECK(again.out == d.out);
    const Run over = run({"sde", "ensemble", "--config", "cfg.json", "--paths", "3", "--dump-config"});
    CHECK(run_config_from_json(Json::parse(over.out)).paths == 3);
}

TEST_CASE("scan over b crosses the hopf point once") {
    const Run r = run({"scan", "--a", "1.1", "--k1", "0.08", "--k2", "0.01", "--m", "0.0025", "--scan", "b",
                       "--from", "0.3", "--to", "0.45", "--steps", "31"});
    REQUIRE(r.code == kExitOk);
    const auto ls = lines(r.out);
    CHECK(ls[0] == "value,n_equilibria,eq,x,y,s,p,taxonomy,b0,lambda,regime");
    int flips = 0;
    double prev = 0.0;
    double b0 = 0.0, crossing = 0.0;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        std::vector<std::string> f;
        std::istringstream is(ls[i]);
        for (std::string cell; std::getline(is, cell, ',');) f.push_back(cell);
        const double b = std::stod(f[0]), s = std::stod(f[5]);
        b0 = std::stod(f[8]);
        if (i > 1 && (s > 0) != (prev > 0)) {
            ++flips;
            crossing = b;
        }
        prev = s;
    }
    CHECK(flips == 1);
    CHECK(std::abs(crossing - b0) <= 0.005 + 1e-12);
}

TEST_CASE("scan over m shows the equilibrium count changing") {
    const Run r = run({"scan", "--a", "0.5", "--b", "0.1", "--k1", "0.08", "--k2", "0.2", "--scan", "m", "--from",
                       "0", "--to", "0.02", "--steps", "21"});
    REQUIRE(r.code == kExitOk);
    const auto ls = lines(r.out);
    std::vector<int> counts;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto a = ls[i].find(',');
        const int n = std::stoi(ls[i].substr(a + 1));
        if (counts.empty() || ls[i].substr(0, a) != ls[i - 1].substr(0, ls[i - 1].find(','))) counts.push_back(n);
    }
    CHECK(counts.front() == 2);
    CHECK(counts[1] == 3);
}

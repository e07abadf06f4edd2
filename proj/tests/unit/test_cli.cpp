#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "infotrans/field_io.hpp"
#include "infotrans/grid.hpp"
#include "infotrans/matrix_transport.hpp"
#include "infotrans/rng.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Runs one CLI invocation in-process with stdout/stderr captured, so the
// tests see exactly the byte stream a user would.
int run_cap(std::vector<std::string> args, std::string* out = nullptr,
            std::string* err = nullptr) {
    std::stringstream so, se;
    std::streambuf* oo = std::cout.rdbuf(so.rdbuf());
    std::streambuf* oe = std::cerr.rdbuf(se.rdbuf());
    int rc = -1;
    try {
        rc = infotrans::cli::run(std::move(args));
    } catch (...) {
        std::cout.rdbuf(oo);
        std::cerr.rdbuf(oe);
        throw;
    }
    std::cout.rdbuf(oo);
    std::cerr.rdbuf(oe);
    if (out) *out = so.str();
    if (err) *err = se.str();
    return rc;
}

std::vector<json> parse_lines(const std::string& text) {
    std::vector<json> events;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) events.push_back(json::parse(line));
    return events;
}

const json* find_event(const std::vector<json>& events, const std::string& name) {
    for (const json& e : events)
        if (e.value("event", "") == name) return &e;
    return nullptr;
}

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() /
              ("infotrans_cli_" + std::to_string(std::uintptr_t(this)));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string operator/(const char* name) const { return (dir / name).string(); }
};

} // namespace

TEST_SUITE("cli") {

TEST_CASE("fisher dist on presets reports the angle") {
    std::string out;
    int rc = run_cap({"fisher", "dist", "--a", "uniform", "--b", "sine05",
                      "--grid", "256"}, &out);
    REQUIRE(rc == 0);
    auto events = parse_lines(out);
    const json* e = find_event(events, "fisher_dist");
    REQUIRE(e != nullptr);
    // spherical angle of the half-sine tilt, pinned by quadrature
    CHECK(std::abs(e->at("theta").get<double>() - 0.182777461930287861764644) < 1e-8);
}

TEST_CASE("fisher geodesic writes a unit-mass density") {
    Scratch tmp;
    std::string out;
    int rc = run_cap({"fisher", "geodesic", "--a", "uniform", "--b", "sine05",
                      "--grid", "128", "--t", "0.5", "--out", tmp / "mid.csv"}, &out);
    REQUIRE(rc == 0);
    auto events = parse_lines(out);
    const json* e = find_event(events, "fisher_geodesic");
    REQUIRE(e != nullptr);
    CHECK(e->at("mass_defect").get<double>() < 1e-10);

    infotrans::ScalarField mid = infotrans::read_csv_field(tmp / "mid.csv");
    CHECK(mid.grid().sizes[0] == 128);
    for (std::size_t i = 0; i < mid.size(); ++i) CHECK(mid[i] > 0.0);
}

TEST_CASE("evolve streams step diagnostics and conserves the 1-D momentum mean") {
    std::string out;
    int rc = run_cap({"evolve", "--u0", "gradsin", "--grid", "256", "--T", "0.05",
                      "--dt", "0.001", "--beta", "1"}, &out);
    REQUIRE(rc == 0);
    auto events = parse_lines(out);

    const json* done = find_event(events, "done");
    REQUIRE(done != nullptr);
    int steps_seen = 0;
    double e0 = -1.0, drift = 0.0;
    for (const json& e : events) {
        if (e.value("event", "") != "step") continue;
        ++steps_seen;
        double en = e.at("energy").get<double>();
        if (e0 < 0.0) e0 = en;
        drift = std::max(drift, std::abs(en - e0) / e0);
        CHECK(e.at("divfree").get<double>() == 0.0);
    }
    CHECK(steps_seen == done->at("snapshots").get<int>());
    CHECK(drift < 1e-10);

    const json* mu = find_event(events, "mu");
    REQUIRE(mu != nullptr);
    CHECK(mu->at("drift").get<double>() < 1e-12);
}

TEST_CASE("evolve writes the snapshots it reports") {
    Scratch tmp;
    std::string out;
    int rc = run_cap({"evolve", "--u0", "swirl", "--grid", "32,32", "--T", "0.02",
                      "--dt", "0.002", "--out", tmp / "traj"}, &out);
    REQUIRE(rc == 0);
    auto events = parse_lines(out);
    const json* done = find_event(events, "done");
    REQUIRE(done != nullptr);
    int n = done->at("snapshots").get<int>();
    CHECK(n >= 2);
    for (int i = 0; i < n; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "u_%06d.bin", i);
        CHECK(fs::exists(fs::path(tmp / "traj") / name));
    }
    infotrans::FieldData first =
        infotrans::read_binary(fs::path(tmp / "traj") / "u_000000.bin");
    CHECK(first.kind == "vector");
    CHECK(first.grid.dim == 2);
}

TEST_CASE("transport realises a 1-D density and saves the map") {
    Scratch tmp;
    std::string out;
    int rc = run_cap({"transport", "--target", "sine05", "--grid", "64",
                      "--steps", "40", "--out", tmp / "psi.bin"}, &out);
    REQUIRE(rc == 0);
    auto events = parse_lines(out);
    const json* e = find_event(events, "transport");
    REQUIRE(e != nullptr);
    CHECK(e->at("density_residual").get<double>() < 5e-3);
    CHECK(std::abs(e->at("theta").get<double>() - 0.182777461930287861764644) < 1e-3);

    infotrans::FieldData psi = infotrans::read_binary(tmp / "psi.bin");
    CHECK(psi.kind == "displacement");
    CHECK(psi.grid.sizes[0] == 64);
    for (const json& ev : events)
        if (ev.value("event", "") == "step")
            CHECK(std::abs(ev.at("mean_correction").get<double>()) < 1e-6);
}

TEST_CASE("factorise emits both factors and the potential") {
    Scratch tmp;
    std::string out;
    int rc = run_cap({"factorise", "--phi", "wave", "--grid", "48,48",
                      "--steps", "60", "--out-dir", tmp / "parts"}, &out);
    REQUIRE(rc == 0);
    auto events = parse_lines(out);
    const json* e = find_event(events, "factorise");
    REQUIRE(e != nullptr);
    CHECK(e->at("vol_residual").get<double>() < 1e-2);
    CHECK(e->at("compose_residual").get<double>() < 1e-2);

    fs::path dir = tmp / "parts";
    CHECK(infotrans::read_binary(dir / "eta.bin").kind == "displacement");
    CHECK(infotrans::read_binary(dir / "psi.bin").kind == "displacement");
    CHECK(infotrans::read_binary(dir / "w0.bin").kind == "scalar");
}

TEST_CASE("matrix subcommands factor what they are given") {
    Scratch tmp;
    infotrans::Rng rng(5);
    infotrans::Mat A = infotrans::random_near_identity(3, rng, 0.2);
    infotrans::write_matrix_csv(tmp / "A.csv", A);

    std::string out;
    int rc = run_cap({"matrix", "qr", "--in", tmp / "A.csv", "--out-dir", tmp / "qr"}, &out);
    REQUIRE(rc == 0);
    auto qr_events = parse_lines(out);
    const json* q = find_event(qr_events, "qr");
    REQUIRE(q != nullptr);
    CHECK(q->at("orthogonality").get<double>() < 1e-12);
    CHECK(q->at("reconstruction").get<double>() < 1e-12);
    CHECK(fs::exists(fs::path(tmp / "qr") / "Q.csv"));
    CHECK(fs::exists(fs::path(tmp / "qr") / "R.csv"));

    infotrans::Mat M = infotrans::random_spd(3, rng);
    infotrans::write_matrix_csv(tmp / "M.csv", M);
    rc = run_cap({"matrix", "cholesky", "--in", tmp / "M.csv", "--out-dir", tmp / "chol"}, &out);
    REQUIRE(rc == 0);
    auto chol_events = parse_lines(out);
    const json* c = find_event(chol_events, "cholesky");
    REQUIRE(c != nullptr);
    CHECK(c->at("residual").get<double>() < 1e-12);

    rc = run_cap({"matrix", "shoot", "--in", tmp / "M.csv", "--out-dir", tmp / "shot"}, &out);
    REQUIRE(rc == 0);
    auto shoot_events = parse_lines(out);
    const json* s = find_event(shoot_events, "shoot");
    REQUIRE(s != nullptr);
    CHECK(s->at("cholesky_mismatch").get<double>() < 1e-6);

    rc = run_cap({"matrix", "check", "--cases", "40", "--seed", "3"}, &out);
    REQUIRE(rc == 0);
    auto check_events = parse_lines(out);
    const json* sum = find_event(check_events, "summary");
    REQUIRE(sum != nullptr);
    CHECK(sum->at("pass").get<bool>());
}

TEST_CASE("validation problems exit with code 1") {
    std::string out, err;
    CHECK(run_cap({"fisher", "dist", "--a", "nosuch", "--b", "uniform",
                   "--grid", "64"}, &out, &err) == 1);
    auto events = parse_lines(err);
    REQUIRE(!events.empty());
    CHECK(events.back().at("kind") == "validation");

    CHECK(run_cap({"fisher", "dist", "--grid", "64"}, &out, &err) == 1);   // --b missing
    CHECK(run_cap({"evolve", "--u0", "meansine", "--grid", "32,32"}, &out, &err) == 1);
    CHECK(run_cap({"evolve", "--u0", "gradsin", "--grid", "64", "--gamma", "1.5"},
                  &out, &err) == 1);
    CHECK(run_cap({"transport", "--target", "sine05", "--grid", "64",
                   "--steps", "4"}, &out, &err) == 1);                     // below minimum
    CHECK(run_cap({"bogus"}, &out, &err) == 1);
    CHECK(run_cap({}, &out, &err) == 1);
}

TEST_CASE("numerical breakdowns exit with code 2") {
    Scratch tmp;
    infotrans::Mat far(2);
    far(0, 0) = std::exp(12.0);
    far(1, 1) = std::exp(-12.0);
    infotrans::write_matrix_csv(tmp / "far.csv", far);

    std::string out, err;
    int rc = run_cap({"matrix", "shoot", "--in", tmp / "far.csv",
                      "--out-dir", tmp / "shot"}, &out, &err);
    CHECK(rc == 2);
    auto events = parse_lines(err);
    REQUIRE(!events.empty());
    CHECK(events.back().at("kind") == "numerical");
}

TEST_CASE("every diagnostic line is one JSON object") {
    std::string out;
    REQUIRE(run_cap({"evolve", "--u0", "gradsin", "--grid", "64", "--T", "0.01",
                     "--dt", "0.001"}, &out) == 0);
    std::istringstream in(out);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        json e = json::parse(line); // throws on malformed output
        CHECK(e.contains("event"));
    }
    CHECK(lines >= 2);
}

TEST_CASE("selftest emits an identical stream for an identical seed") {
    std::string a, b, c;
    REQUIRE(run_cap({"selftest", "--seed", "7"}, &a) == 0);
    REQUIRE(run_cap({"selftest", "--seed", "7"}, &b) == 0);
    CHECK(a == b);
    REQUIRE(run_cap({"selftest", "--seed", "8"}, &c) == 0);
    CHECK(a != c);
}

} // TEST_SUITE

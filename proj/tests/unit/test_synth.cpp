#include <doctest.h>

#include "helpers.hpp"
#include "mugrid/error.hpp"
#include "mugrid/io.hpp"
#include "mugrid/powerflow.hpp"
#include "mugrid/synth.hpp"

using namespace mugrid;
using fixture::line;
using fixture::make_net;

TEST_SUITE("synth") {
    TEST_CASE("same seed, same bytes") {
        SynthConfig cfg;
        cfg.n = 20;
        cfg.seed = 7;
        const auto a = generate(cfg), b = generate(cfg);
        CHECK(io::network_to_json(a.net, a.params).dump() == io::network_to_json(b.net, b.params).dump());
        CHECK(a.seed_angles == b.seed_angles);
        cfg.seed = 8;
        CHECK(io::network_to_json(generate(cfg).net).dump() != io::network_to_json(a.net).dump());
    }

    TEST_CASE("sampled values lie in the configured ranges") {
        for (std::uint64_t seed = 1; seed <= 30; ++seed) {
            SynthConfig cfg;
            cfg.n = 10 + static_cast<int>(seed % 15);
            cfg.seed = seed;
            const auto c = generate(cfg);
            for (const auto& l : c.net.lines) {
                CHECK(cfg.b.contains(l.b));
                CHECK(l.g >= 0.0);
                CHECK(l.g <= 0.5 * std::abs(l.b));
            }
            for (const auto& node : c.net.nodes) CHECK(cfg.v.contains(node.voltage));
            for (Eigen::Index i = 0; i < c.seed_angles.size(); ++i) CHECK(cfg.delta.contains(c.seed_angles(i)));
            for (const auto& e : c.params.entries()) {
                CHECK(cfg.d.contains(e.d));
                CHECK(cfg.m.contains(e.m));
            }
            CHECK(validate_network(c.net).connected);
            CHECK(c.diameter == graph_diameter(c.net));
        }
    }

    TEST_CASE("seed angles are an exact equilibrium") {
        SynthConfig cfg;
        cfg.n = 15;
        const auto c = generate(cfg);
        const auto Y = build_admittance(c.net);
        const auto p = flow_active(Y, c.net.voltages(), c.seed_angles);
        for (const auto& e : c.params.entries()) CHECK(e.p_set == p(e.id));
        SolverOptions o;
        o.initial = c.seed_angles;
        const auto eq = solve_equilibrium(Y, c.net.voltages(), p, o);
        CHECK(eq.iterations == 0);
    }

    TEST_CASE("large instances are connected") {
        for (int n : {50, 100}) {
            SynthConfig cfg;
            cfg.n = n;
            const auto c = generate(cfg);
            CHECK(static_cast<int>(c.net.size()) == n);
            CHECK(validate_network(c.net).connected);
            CHECK(c.diameter > 0);
        }
    }

    TEST_CASE("config validation") {
        SynthConfig cfg;
        cfg.n = 1;
        CHECK_THROWS_AS(generate(cfg), ParameterError);
        cfg = {};
        cfg.b = {-1.0, 0.5};
        CHECK_THROWS_AS(generate(cfg), ParameterError);
        cfg = {};
        cfg.d = {3.0, 1.0};
        CHECK_THROWS_AS(generate(cfg), ParameterError);
        cfg = {};
        cfg.edge_probability = 1.5;
        CHECK_THROWS_AS(generate(cfg), ParameterError);
        cfg = {};
        cfg.n = 40;
        cfg.edge_probability = 1e-3;
        cfg.max_attempts = 3;
        CHECK_THROWS_AS(generate(cfg), NetworkError);
        cfg = {};
        cfg.n = 11;
        CHECK(cfg.edge_prob() == doctest::Approx(0.4));
    }

    TEST_CASE("diameter") {
        CHECK(graph_diameter(make_net(4, {line(0, 1, 0, -1), line(1, 2, 0, -1), line(2, 3, 0, -1)})) == 3);
        CHECK(graph_diameter(make_net(3, {line(0, 1, 0, -1), line(1, 2, 0, -1), line(0, 2, 0, -1)})) == 1);
        CHECK(graph_diameter(make_net(3, {line(0, 1, 0, -1)})) == -1);
    }

    TEST_CASE("sampler draws are in [0, 1)") {
        Sampler s(3);
        for (int i = 0; i < 10000; ++i) {
            const double u = s.unit();
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
        }
        Sampler a(5), b(5);
        for (int i = 0; i < 100; ++i) CHECK(a.unit() == b.unit());
    }
}

// Copyright 2026 The cauchyloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Scenario runner: ingests JSON scenario files, executes the declared
// checks in order, and emits a deterministic CSV or JSON report. Exit
// codes: 0 all checks pass, 1 configuration or parse error (no report
// written), 2 at least one check failed.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cauchyloc/verify.hpp"

using json = nlohmann::json;
using namespace cauchyloc;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Deterministic formatting: 17 significant digits, fixed exponent style.

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

std::uint64_t fnv1a(const std::string &s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h = (h ^ c) * 1099511628211ull;
    }
    return h;
}

struct ReportRow {
    std::string scenario;
    std::string check;
    std::string digest;
    double x{0.0};
    double value{0.0};
    double quad_error{0.0};
    double truncation_error{0.0};
    bool pass{false};
    std::string detail; // semicolon-separated key=value pairs
};

// ---------------------------------------------------------------------------
// Scenario schema parsing.

Vec3 parse_vec3(const json &j, const char *where) {
    if (!j.is_array() || j.size() != 3) {
        throw ConfigError(std::string(where) + ": expected an array of 3 numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

FourVector parse_vec4(const json &j, const char *where) {
    if (!j.is_array() || j.size() != 4) {
        throw ConfigError(std::string(where) + ": expected an array of 4 numbers");
    }
    return {j[0].get<double>(), {j[1].get<double>(), j[2].get<double>(), j[3].get<double>()}};
}

MassShellGrid parse_grid(const json &j, double mass) {
    if (!j.contains("half_extent") || !j.contains("points_per_axis")) {
        throw ConfigError("grid: needs half_extent and points_per_axis");
    }
    return MassShellGrid(mass, j["half_extent"].get<double>(),
                         j["points_per_axis"].get<int>());
}

MomentumState parse_state(const json &j, double mass) {
    if (!j.contains("type") || !j.contains("grid")) {
        throw ConfigError("state: needs type and grid");
    }
    const std::string type = j["type"].get<std::string>();
    const MassShellGrid grid = parse_grid(j["grid"], mass);
    if (type == "gaussian") {
        AnalyticGaussian g;
        if (j.contains("center_p")) g.center_p = parse_vec3(j["center_p"], "state.center_p");
        if (j.contains("spread")) g.spread = parse_vec3(j["spread"], "state.spread");
        if (j.contains("center_x")) g.center_x = parse_vec3(j["center_x"], "state.center_x");
        return MomentumState(g, grid);
    }
    if (type == "compact-bump") {
        CompactBump b;
        if (j.contains("center_p")) b.center_p = parse_vec3(j["center_p"], "state.center_p");
        if (j.contains("inner_radius")) b.inner_radius = j["inner_radius"].get<double>();
        if (j.contains("outer_radius")) b.outer_radius = j["outer_radius"].get<double>();
        return MomentumState(b, grid);
    }
    if (type == "nw-compact") {
        const double radius = j.value("radius", 1.0);
        return nw_compact_state(radius, grid);
    }
    throw ConfigError("state: unknown type '" + type + "'");
}

// Scalar kernel profile. The constant profile ("flat", g == 1) is the
// negative control: it is only legal inside a kernel-check.
struct KernelChoice {
    std::optional<CausalKernelSpec> spec; // empty for the flat control
};

KernelChoice parse_kernel(const json &j, double mass) {
    if (!j.contains("type")) {
        throw ConfigError("kernel: needs a type");
    }
    const std::string type = j["type"].get<std::string>();
    if (type == "power-law") {
        return {CausalKernelSpec(PowerLaw{j.value("r", 1.5)}, mass)};
    }
    if (type == "shifted-power") {
        return {CausalKernelSpec(ShiftedPower{j.value("c", 1.0), j.value("n", 2)}, mass)};
    }
    if (type == "convex") {
        Convex cv;
        if (!j.contains("weights") || !j.contains("parts")) {
            throw ConfigError("kernel: convex needs weights and parts");
        }
        for (const auto &w : j["weights"]) {
            cv.weights.push_back(w.get<double>());
        }
        for (const auto &p : j["parts"]) {
            auto part = parse_kernel(p, mass);
            if (!part.spec) {
                throw ConfigError("kernel: convex parts must be scalar profiles");
            }
            cv.parts.push_back(*part.spec);
        }
        return {CausalKernelSpec(cv, mass)};
    }
    if (type == "flat") {
        return {std::nullopt};
    }
    throw ConfigError("kernel: unknown type '" + type + "'");
}

ObservableSpec parse_observable(const json &j, double mass) {
    if (!j.contains("type")) {
        throw ConfigError("observable: needs a type");
    }
    const std::string type = j["type"].get<std::string>();
    if (type == "causal-t") {
        if (!j.contains("kernel")) {
            throw ConfigError("observable: causal-t needs a kernel");
        }
        auto k = parse_kernel(j["kernel"], mass);
        if (!k.spec) {
            throw ConfigError("observable: the flat control kernel is only valid in kernel-check");
        }
        return CausalKernelT{*k.spec};
    }
    if (type == "stress-energy-m") {
        StressEnergyM m;
        if (j.contains("n")) m.n = parse_vec4(j["n"], "observable.n");
        return m;
    }
    if (type == "newton-wigner") {
        return NewtonWignerQ{};
    }
    throw ConfigError("observable: unknown type '" + type + "'");
}

CauchySurfaceGraph parse_surface(const json &j) {
    if (!j.contains("family")) {
        throw ConfigError("surface: needs a family");
    }
    const std::string family = j["family"].get<std::string>();
    const double t0 = j.value("t0", 0.0);
    Vec3 u{0, 0, 0};
    if (j.contains("u")) u = parse_vec3(j["u"], "surface.u");
    if (family == "flat") {
        return CauchySurfaceGraph::flat(t0, u);
    }
    if (family == "bump") {
        Vec3 center{0, 0, 0};
        if (j.contains("center")) center = parse_vec3(j["center"], "surface.center");
        return CauchySurfaceGraph::bump(t0, u, j.value("amplitude", 0.3), center,
                                        j.value("width", 1.0));
    }
    throw ConfigError("surface: unknown family '" + family + "'");
}

Region parse_region(const json &j, const std::map<std::string, Region> &named);

Region parse_region_inner(const json &j, const std::map<std::string, Region> &named) {
    if (j.is_string()) {
        const auto it = named.find(j.get<std::string>());
        if (it == named.end()) {
            throw ConfigError("region: unresolved reference '" + j.get<std::string>() + "'");
        }
        return it->second;
    }
    if (!j.contains("type")) {
        throw ConfigError("region: needs a type");
    }
    const std::string type = j["type"].get<std::string>();
    if (type == "all") {
        return Region::all();
    }
    if (type == "ball") {
        Vec3 c{0, 0, 0};
        if (j.contains("center")) c = parse_vec3(j["center"], "region.center");
        return Region::ball(c, j.value("radius", 1.0));
    }
    if (type == "box") {
        return Region::box(parse_vec3(j.at("lo"), "region.lo"),
                           parse_vec3(j.at("hi"), "region.hi"));
    }
    if (type == "complement") {
        return Region::complement(parse_region(j.at("of"), named));
    }
    throw ConfigError("region: unknown type '" + type + "'");
}

Region parse_region(const json &j, const std::map<std::string, Region> &named) {
    return parse_region_inner(j, named);
}

QuadConfig parse_quad(const json &j) {
    QuadConfig cfg;
    if (j.contains("spatial_box_half")) cfg.spatial_box_half = j["spatial_box_half"].get<double>();
    if (j.contains("spatial_nodes_per_axis"))
        cfg.spatial_nodes_per_axis = j["spatial_nodes_per_axis"].get<int>();
    if (j.contains("refinement_levels")) cfg.refinement_levels = j["refinement_levels"].get<int>();
    if (j.contains("mc_samples")) cfg.mc_samples = j["mc_samples"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("target_tol")) cfg.target_tol = j["target_tol"].get<double>();
    cfg.validate();
    return cfg;
}

PoincareElement parse_transform(const json &j) {
    if (!j.contains("kind")) {
        throw ConfigError("transform: needs a kind");
    }
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "translation") {
        return PoincareElement::translation(parse_vec4(j.at("y"), "transform.y"));
    }
    if (kind == "boost-x") {
        return PoincareElement::boost_x(j.value("rapidity", 0.3));
    }
    if (kind == "rotation-z") {
        return PoincareElement::rotation_z(j.value("angle", 0.5));
    }
    throw ConfigError("transform: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Check execution.

struct ScenarioContext {
    std::string name;
    double mass{1.0};
    std::optional<MomentumState> psi;
    std::optional<ObservableSpec> obs;
    std::optional<KernelChoice> kernel; // scalar profile for kernel-check
    std::map<std::string, CauchySurfaceGraph> surfaces;
    std::map<std::string, Region> regions;
    QuadConfig quad;
    std::uint64_t seed{0};
};

const CauchySurfaceGraph &surface_ref(const ScenarioContext &ctx, const json &j,
                                      const char *field) {
    if (!j.contains(field)) {
        throw ConfigError(std::string("check: missing field '") + field + "'");
    }
    const std::string name = j[field].get<std::string>();
    const auto it = ctx.surfaces.find(name);
    if (it == ctx.surfaces.end()) {
        throw ConfigError("check: unresolved surface '" + name + "'");
    }
    return it->second;
}

Region region_ref(const ScenarioContext &ctx, const json &j, const char *field) {
    if (!j.contains(field)) {
        throw ConfigError(std::string("check: missing field '") + field + "'");
    }
    return parse_region(j[field], ctx.regions);
}

const MomentumState &state_ref(const ScenarioContext &ctx) {
    if (!ctx.psi) {
        throw ConfigError("scenario: this check needs a state");
    }
    return *ctx.psi;
}

const ObservableSpec &obs_ref(const ScenarioContext &ctx) {
    if (!ctx.obs) {
        throw ConfigError("scenario: this check needs an observable");
    }
    return *ctx.obs;
}

std::vector<Vec3> kernel_check_sample(std::size_t count, std::uint64_t seed, double scale) {
    CounterRng rng(seed, 0x6b63686bu);
    std::vector<Vec3> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        for (int a = 0; a < 3; ++a) {
            const double u1 = std::max(1e-12, rng.uniform(6 * i + 2 * a));
            const double u2 = rng.uniform(6 * i + 2 * a + 1);
            out[i][a] =
                scale * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
    }
    return out;
}

ReportRow run_check(const ScenarioContext &ctx, const json &jc, std::size_t index) {
    if (!jc.contains("type")) {
        throw ConfigError("check: needs a type");
    }
    const std::string type = jc["type"].get<std::string>();
    ReportRow row;
    row.scenario = ctx.name;
    row.check = type;
    row.x = static_cast<double>(index);
    row.digest = [&] {
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a(jc.dump())));
        return std::string(buf);
    }();

    if (type == "causality") {
        const auto &S = surface_ref(ctx, jc, "source_surface");
        const auto &S2 = surface_ref(ctx, jc, "target_surface");
        const Region delta = region_ref(ctx, jc, "region");
        const auto r = check_causality(obs_ref(ctx), state_ref(ctx), S, delta, S2, ctx.quad);
        row.value = r.margin;
        row.quad_error = r.p_source.quad_error + r.p_influence.quad_error;
        row.truncation_error = r.p_source.truncation_error + r.p_influence.truncation_error;
        row.pass = r.pass;
        if (delta.kind() == Region::Kind::Ball) {
            row.x = delta.ball_radius();
        }
        row.detail = "p_source=" + fmt(r.p_source.value) +
                     ";p_influence=" + fmt(r.p_influence.value);
        return row;
    }
    if (type == "coherence") {
        const auto &S1 = surface_ref(ctx, jc, "surface1");
        const auto &S2 = surface_ref(ctx, jc, "surface2");
        const Region delta = region_ref(ctx, jc, "region");
        const auto r = check_coherence(obs_ref(ctx), state_ref(ctx), S1, S2, delta, ctx.quad);
        row.value = r.p1.value - r.p2.value;
        row.quad_error = r.p1.quad_error + r.p2.quad_error;
        row.truncation_error = r.p1.truncation_error + r.p2.truncation_error;
        row.pass = r.pass;
        row.detail = "p1=" + fmt(r.p1.value) + ";p2=" + fmt(r.p2.value);
        return row;
    }
    if (type == "covariance") {
        const auto &S = surface_ref(ctx, jc, "surface");
        const Region delta = region_ref(ctx, jc, "region");
        const PoincareElement h = parse_transform(jc.at("transform"));
        const bool transform_frame = jc.value("transform_frame", true);
        const auto r = check_covariance(obs_ref(ctx), h, state_ref(ctx), S, delta, ctx.quad,
                                        transform_frame);
        row.value = r.p_original.value - r.p_transformed.value;
        row.quad_error = r.p_original.quad_error + r.p_transformed.quad_error;
        row.truncation_error =
            r.p_original.truncation_error + r.p_transformed.truncation_error;
        row.pass = r.pass;
        row.detail = "p_original=" + fmt(r.p_original.value) +
                     ";p_transformed=" + fmt(r.p_transformed.value);
        return row;
    }
    if (type == "conservation") {
        if (!jc.contains("surfaces")) {
            throw ConfigError("conservation: needs a surface list");
        }
        std::vector<CauchySurfaceGraph> list;
        for (const auto &name : jc["surfaces"]) {
            const auto it = ctx.surfaces.find(name.get<std::string>());
            if (it == ctx.surfaces.end()) {
                throw ConfigError("conservation: unresolved surface");
            }
            list.push_back(it->second);
        }
        const double tol = jc.value("tolerance", 1e-2);
        const auto r = check_conservation(obs_ref(ctx), state_ref(ctx), list, ctx.quad, tol);
        row.value = r.values.front().value;
        row.pass = r.pass;
        for (const auto &v : r.values) {
            row.quad_error += v.quad_error;
            row.truncation_error += v.truncation_error;
        }
        row.detail = "max_rel_dev=" + fmt(r.max_rel_dev);
        return row;
    }
    if (type == "moments") {
        const auto &S = surface_ref(ctx, jc, "surface");
        std::array<int, 3> alpha{0, 0, 0};
        if (jc.contains("alpha")) {
            for (int a = 0; a < 3; ++a) {
                alpha[a] = jc["alpha"][a].get<int>();
            }
        }
        double err = 0.0;
        const double v = moment(obs_ref(ctx), state_ref(ctx), S, alpha, ctx.quad, &err);
        row.value = v;
        row.quad_error = err;
        row.truncation_error = state_ref(ctx).diagnostics().truncation_loss;
        if (jc.contains("expect")) {
            const double tol = jc.value("tolerance", 1e-3);
            row.pass = std::abs(v - jc["expect"].get<double>()) <= tol + err;
        } else {
            row.pass = true;
        }
        row.x = static_cast<double>(alpha[0] + alpha[1] + alpha[2]);
        return row;
    }
    if (type == "heisenberg") {
        const auto &S = surface_ref(ctx, jc, "surface");
        const int axis = jc.value("axis", 0);
        const auto r = heisenberg_report(obs_ref(ctx), state_ref(ctx), S, axis, ctx.quad);
        row.value = r.lhs;
        row.quad_error = r.tolerance;
        row.truncation_error = state_ref(ctx).diagnostics().truncation_loss;
        row.pass = r.modified_ok;
        row.x = static_cast<double>(axis);
        row.detail = "modified_rhs=" + fmt(r.modified_rhs) +
                     ";kappa=" + fmt(r.kappa_expectation) + ";dx=" + fmt(r.dx) +
                     ";dp=" + fmt(r.dp);
        return row;
    }
    if (type == "kernel-check") {
        if (!ctx.kernel && !ctx.obs) {
            throw ConfigError("kernel-check: needs a kernel or observable");
        }
        MomentumKernel kern;
        if (ctx.kernel) {
            if (ctx.kernel->spec) {
                kern = momentum_kernel_T(*ctx.kernel->spec);
            } else {
                // g == 1 negative control; the library refuses to build it,
                // so the runner assembles the kernel directly.
                const double m = ctx.mass;
                kern = [m](const Vec3 &p, const Vec3 &q) {
                    const double ep = lift(p, m), eq = lift(q, m);
                    return Complex((ep + eq) / (2.0 * std::sqrt(ep * eq)), 0.0);
                };
            }
        } else {
            kern = detail::observable_kernel(*ctx.obs, ctx.mass);
        }
        const int samples = jc.value("samples", 50);
        const double tol = jc.value("tol", 1e-8);
        const std::uint64_t seed = ctx.seed + jc.value("seed_offset", 0);
        const auto sample = kernel_check_sample(static_cast<std::size_t>(samples), seed, 0.8);
        const auto r = gram_psd_check(kern, sample, tol);
        row.value = r.min_eig;
        row.quad_error = tol * std::max(1.0, r.max_eig);
        row.pass = r.pass;
        row.x = static_cast<double>(samples);
        row.detail = "min_eig=" + fmt(r.min_eig) + ";max_eig=" + fmt(r.max_eig);
        return row;
    }
    if (type == "hegerfeldt") {
        const double radius = jc.value("radius", 1.0);
        const double t = jc.value("t", 0.1);
        const auto r = hegerfeldt_leak_demo(state_ref(ctx), radius, t, ctx.quad);
        row.value = r.leak.value;
        row.quad_error = r.leak.quad_error + r.floor.quad_error;
        row.truncation_error = r.leak.truncation_error + r.floor.truncation_error;
        // The demo documents the leak: it passes when the leak clears the
        // numerical floor, demonstrating the projector's acausality.
        row.pass = r.above_floor;
        row.x = radius;
        row.detail = "floor=" + fmt(r.floor.value) + ";ratio=" + fmt(r.ratio);
        return row;
    }
    throw ConfigError("check: unknown type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Report emission.

const char *kCsvHeader = "scenario,check,digest,x,value,quad_error,truncation_error,pass,detail";

std::string render_csv(const std::vector<ReportRow> &rows) {
    std::ostringstream out;
    out << kCsvHeader << "\n";
    for (const auto &r : rows) {
        out << r.scenario << ',' << r.check << ',' << r.digest << ',' << fmt(r.x) << ','
            << fmt(r.value) << ',' << fmt(r.quad_error) << ',' << fmt(r.truncation_error)
            << ',' << (r.pass ? "pass" : "fail") << ',' << r.detail << "\n";
    }
    return out.str();
}

std::string render_json(const std::vector<ReportRow> &rows) {
    // Hand-rendered so float formatting stays fixed at 17 significant digits.
    std::ostringstream out;
    out << "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto &r = rows[i];
        out << "  {\"scenario\":\"" << r.scenario << "\",\"check\":\"" << r.check
            << "\",\"digest\":\"" << r.digest << "\",\"x\":\"" << fmt(r.x)
            << "\",\"value\":\"" << fmt(r.value) << "\",\"quad_error\":\""
            << fmt(r.quad_error) << "\",\"truncation_error\":\"" << fmt(r.truncation_error)
            << "\",\"pass\":" << (r.pass ? "true" : "false") << ",\"detail\":\"" << r.detail
            << "\"}" << (i + 1 < rows.size() ? "," : "") << "\n";
    }
    out << "]\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Subcommand: run.

int cmd_run(const std::vector<std::string> &files, const std::string &output_override,
            const std::string &format_override, int jobs) {
    if (jobs < 1) {
        std::cerr << "error: --jobs must be at least 1\n";
        return 1;
    }
    std::vector<ReportRow> rows;
    std::string out_path;
    std::string out_format = "csv";
    bool any_fail = false;

    try {
        for (const auto &file : files) {
            std::ifstream in(file);
            if (!in) {
                throw ConfigError("cannot open scenario file: " + file);
            }
            json j;
            try {
                j = json::parse(in);
            } catch (const json::parse_error &e) {
                throw ConfigError("parse error in " + file + ": " + e.what());
            }
            if (j.value("schema_version", 0) != 1) {
                throw ConfigError(file + ": unsupported schema_version");
            }

            ScenarioContext ctx;
            ctx.name = j.value("name", std::filesystem::path(file).stem().string());
            ctx.mass = j.value("mass", 1.0);
            if (!(ctx.mass > 0.0)) {
                throw ConfigError(file + ": mass must be positive");
            }
            if (j.contains("quad")) {
                ctx.quad = parse_quad(j["quad"]);
            }
            ctx.seed = j.value("seed", 0ull);
            if (const char *env = std::getenv("CAUCHYLOC_SEED")) {
                ctx.seed = std::strtoull(env, nullptr, 10);
            }
            ctx.quad.seed = ctx.seed;
            if (j.contains("state")) {
                ctx.psi = parse_state(j["state"], ctx.mass);
            }
            if (j.contains("observable")) {
                ctx.obs = parse_observable(j["observable"], ctx.mass);
            }
            if (j.contains("kernel")) {
                ctx.kernel = parse_kernel(j["kernel"], ctx.mass);
            }
            if (j.contains("surfaces")) {
                for (const auto &js : j["surfaces"]) {
                    if (!js.contains("name")) {
                        throw ConfigError(file + ": every surface needs a name");
                    }
                    ctx.surfaces.emplace(js["name"].get<std::string>(), parse_surface(js));
                }
            }
            if (j.contains("regions")) {
                for (const auto &jr : j["regions"]) {
                    if (!jr.contains("name")) {
                        throw ConfigError(file + ": every region needs a name");
                    }
                    ctx.regions.emplace(jr["name"].get<std::string>(),
                                        parse_region(jr, ctx.regions));
                }
            }
            if (!j.contains("checks") || !j["checks"].is_array() || j["checks"].empty()) {
                throw ConfigError(file + ": needs a non-empty checks list");
            }

            if (j.contains("output")) {
                out_format = j["output"].value("format", "csv");
                out_path = j["output"].value("path", "");
            }

            std::size_t index = 0;
            for (const auto &jc : j["checks"]) {
                ReportRow row = run_check(ctx, jc, index++);
                any_fail = any_fail || !row.pass;
                std::cout << (row.pass ? "[PASS] " : "[FAIL] ") << row.scenario << "/"
                          << row.check << " value=" << fmt(row.value)
                          << " err=" << fmt(row.quad_error + row.truncation_error) << "\n";
                rows.push_back(std::move(row));
            }
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    if (!output_override.empty()) {
        out_path = output_override;
    }
    if (!format_override.empty()) {
        out_format = format_override;
    }
    if (out_format != "csv" && out_format != "json") {
        std::cerr << "error: output format must be csv or json\n";
        return 1;
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write report to " << out_path << "\n";
            return 1;
        }
        out << (out_format == "csv" ? render_csv(rows) : render_json(rows));
    }
    return any_fail ? 2 : 0;
}

// ---------------------------------------------------------------------------
// Subcommand: plotdata.

int cmd_plotdata(const std::string &report_path, const std::string &axis,
                 const std::string &out_path) {
    if (axis != "x" && axis != "index") {
        std::cerr << "error: unknown axis '" << axis << "' (use x or index)\n";
        return 1;
    }
    std::ifstream in(report_path);
    if (!in) {
        std::cerr << "error: cannot open report " << report_path << "\n";
        return 1;
    }
    std::string header;
    if (!std::getline(in, header) || header != kCsvHeader) {
        std::cerr << "error: " << report_path << " is not a csv report\n";
        return 1;
    }
    std::ostringstream out;
    out << "scenario,check,x,y,yerr\n";
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) {
            cols.push_back(col);
        }
        if (cols.size() < 8) {
            std::cerr << "error: malformed report row\n";
            return 1;
        }
        const double x = (axis == "x") ? std::strtod(cols[3].c_str(), nullptr)
                                       : static_cast<double>(index);
        const double y = std::strtod(cols[4].c_str(), nullptr);
        const double yerr = std::strtod(cols[5].c_str(), nullptr) +
                            std::strtod(cols[6].c_str(), nullptr);
        out << cols[0] << ',' << cols[1] << ',' << fmt(x) << ',' << fmt(y) << ','
            << fmt(yerr) << "\n";
        ++index;
    }
    if (out_path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return 1;
        }
        f << out.str();
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Subcommand: list-scenarios.

int cmd_list(const std::string &dir_flag) {
    std::string dir = dir_flag;
    if (dir.empty()) {
        if (const char *env = std::getenv("CAUCHYLOC_SCENARIO_DIR")) {
            dir = env;
        } else {
            dir = "scenarios";
        }
    }
    if (!std::filesystem::is_directory(dir)) {
        std::cerr << "error: scenario directory not found: " << dir << "\n";
        return 1;
    }
    std::vector<std::string> names;
    for (const auto &entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") {
            names.push_back(entry.path().filename().string());
        }
    }
    std::sort(names.begin(), names.end());
    for (const auto &n : names) {
        std::cout << n << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"cauchyloc scenario runner"};
    app.require_subcommand(1);

    auto *run = app.add_subcommand("run", "execute scenario files and emit a report");
    std::vector<std::string> files;
    std::string output_override, format_override;
    int jobs = 1;
    run->add_option("files", files, "scenario files")->required()->expected(-1);
    run->add_option("-o,--output", output_override, "report path override");
    run->add_option("--format", format_override, "report format override (csv|json)");
    run->add_option("-j,--jobs", jobs, "worker count (scenarios run independently)");

    auto *plot = app.add_subcommand("plotdata", "convert a csv report to plot-ready csv");
    std::string report_path, axis = "x", plot_out;
    plot->add_option("report", report_path, "csv report path")->required();
    plot->add_option("--axis", axis, "x axis source: x or index");
    plot->add_option("-o,--output", plot_out, "output path (default stdout)");

    auto *list = app.add_subcommand("list-scenarios", "list bundled scenario files");
    std::string dir_flag;
    list->add_option("--dir", dir_flag, "scenario directory");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        return cmd_run(files, output_override, format_override, jobs);
    }
    if (plot->parsed()) {
        return cmd_plotdata(report_path, axis, plot_out);
    }
    return cmd_list(dir_flag);
}

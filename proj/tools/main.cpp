// Command-line front end: metric selection, point/sample specification, and
// the report / verify / classify / scan / fd-check commands with JSON, CSV
// and text output.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cfinsler/classify.hpp"
#include "cfinsler/curvature.hpp"
#include "cfinsler/errors.hpp"
#include "cfinsler/frame.hpp"
#include "cfinsler/geometry.hpp"
#include "cfinsler/metrics.hpp"

using json = nlohmann::ordered_json;
using namespace cfinsler;

namespace {

constexpr int kSchemaVersion = 1;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitDomain = 2;
constexpr int kExitParse = 3;
constexpr int kExitBudget = 4;

struct CliParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string metric = "builtin:euclidean";
    std::vector<std::string> params;
    int order = 6;
    double tol = 1e-7;
    std::uint64_t seed = 42;
    int samples = 10;
    std::string point;
    std::string grid;
    std::string format = "text";
    std::string out;
    std::string suite;
};

// ---- parsing helpers -------------------------------------------------------

std::string strip_ws(const std::string& s) {
    std::string r;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) r.push_back(c);
    return r;
}

// complex literal: a, bi, a+bi, a-bi, i, -i
Complex parse_complex(const std::string& raw) {
    std::string s = strip_ws(raw);
    if (s.empty()) throw CliParseError("empty complex literal");
    auto num = [](const std::string& t) -> double {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        size_t used = 0;
        double v = std::stod(t, &used);
        if (used != t.size()) throw CliParseError("bad number '" + t + "'");
        return v;
    };
    try {
        if (s.back() == 'i') {
            std::string body = s.substr(0, s.size() - 1);
            // split a real part if one is present: scan for +/- not at the
            // start and not part of an exponent
            for (size_t p = body.size(); p-- > 1;) {
                if ((body[p] == '+' || body[p] == '-') &&
                    body[p - 1] != 'e' && body[p - 1] != 'E')
                    return {num(body.substr(0, p)), num(body.substr(p))};
            }
            return {0.0, num(body)};
        }
        return {num(s), 0.0};
    } catch (const std::invalid_argument&) {
        throw CliParseError("bad complex literal '" + raw + "'");
    } catch (const std::out_of_range&) {
        throw CliParseError("complex literal out of range '" + raw + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

// "z=a+bi,c+di; eta=e+fi,g+hi" ('|' also accepted as segment separator)
Point parse_point(const std::string& text) {
    std::optional<std::array<Complex, 2>> z, eta;
    std::string norm = strip_ws(text);
    std::replace(norm.begin(), norm.end(), '|', ';');
    for (const std::string& part : split(norm, ';')) {
        if (part.empty()) continue;
        auto eq = part.find('=');
        if (eq == std::string::npos) throw CliParseError("expected key=val in point spec");
        std::string key = part.substr(0, eq);
        auto vals = split(part.substr(eq + 1), ',');
        if (vals.size() != 2) throw CliParseError("expected two components for '" + key + "'");
        std::array<Complex, 2> v{parse_complex(vals[0]), parse_complex(vals[1])};
        if (key == "z")
            z = v;
        else if (key == "eta")
            eta = v;
        else
            throw CliParseError("unknown point key '" + key + "'");
    }
    if (!z || !eta) throw CliParseError("point spec needs both z= and eta=");
    return {*z, *eta};
}

MetricSpec resolve_metric(const RunConfig& cfg) {
    std::map<std::string, std::string> params;
    for (const std::string& p : cfg.params) {
        auto eq = p.find('=');
        if (eq == std::string::npos) throw CliParseError("--param expects K=V, got '" + p + "'");
        params[p.substr(0, eq)] = p.substr(eq + 1);
    }
    if (cfg.metric.rfind("builtin:", 0) == 0) {
        std::string name = cfg.metric.substr(8);
        if (!is_builtin(name)) throw CliParseError("unknown builtin metric '" + name + "'");
        if (name == "antonelli-shimada") {
            auto it = params.find("sigma");
            std::string sigma = it == params.end() ? "0" : it->second;
            try {
                sigma = sigma_preset(sigma);
            } catch (const DomainViolation&) {
                // not a preset name: treat as a DSL expression in z1, z2
            }
            return antonelli_shimada(sigma);
        }
        if (!params.empty()) throw CliParseError("metric '" + name + "' takes no parameters");
        return builtin(name);
    }
    if (!cfg.metric.empty() && cfg.metric[0] == '@') {
        std::string path = cfg.metric.substr(1);
        std::ifstream in(path);
        if (!in) throw CliParseError("cannot read metric file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_metric(path, ss.str());
    }
    throw CliParseError("--metric must be builtin:NAME or @file");
}

std::vector<Point> resolve_points(const MetricSpec& spec, const RunConfig& cfg) {
    if (!cfg.point.empty()) {
        Point pt = parse_point(cfg.point);
        std::string why;
        if (!spec.admitted(pt.first, pt.second, &why))
            throw DomainViolation("point outside domain of " + spec.name + ": " + why);
        return {pt};
    }
    return sample_admitted(spec, cfg.samples, cfg.seed);
}

// ---- output helpers --------------------------------------------------------

json cpx(Complex c) { return json{{"re", c.real()}, {"im", c.imag()}}; }

json point_json(const Point& pt) {
    return json{{"z", {cpx(pt.first[0]), cpx(pt.first[1])}},
                {"eta", {cpx(pt.second[0]), cpx(pt.second[1])}}};
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream out(cfg.out);
        if (!out) throw CliParseError("cannot write '" + cfg.out + "'");
        out << text;
        if (!text.empty() && text.back() != '\n') out << '\n';
    }
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- report ----------------------------------------------------------------

json report_point(const MetricSpec& spec, const Point& pt, const RunConfig& cfg,
                  const ToleranceConfig& tol) {
    GeometryData gd = compute_geometry(spec, JetContext(cfg.order, pt.first, pt.second));
    FrameBundle fb = compute_frame(gd);
    CurvatureData cd = compute_curvature(gd, fb);
    PointClassification pc = classify_point(spec, pt, cfg.order, tol);

    json rec;
    rec["point"] = point_json(pt);
    rec["L"] = gd.ft.L.value().real();
    rec["F"] = fb.frame.F.value().real();
    json gmat = json::array();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) gmat.push_back(cpx(gd.ft.g[i][j].value()));
    rec["g"] = gmat;
    rec["det_g"] = cpx(gd.ft.det.value());
    rec["A"] = cpx(fb.vs.A.value());
    rec["B"] = cpx(fb.vs.B.value());
    json hs;
    const auto& h = fb.hs;
    hs["J"] = cpx(h.J.value());
    hs["U"] = cpx(h.U.value());
    hs["V"] = cpx(h.V.value());
    hs["X"] = cpx(h.X.value());
    hs["O"] = cpx(h.O.value());
    hs["Y"] = cpx(h.Y.value());
    hs["E"] = cpx(h.E.value());
    hs["H"] = cpx(h.H.value());
    rec["horizontal_scalars"] = hs;
    rec["I"] = cpx(cd.inv_I.I.value());
    rec["K"] = cpx(cd.inv_K.value());
    rec["W"] = cpx(cd.inv_W.value());
    json sc;
    sc["Kv_l"] = {{"contraction", cpx(cd.sectional.Kv_l_contraction)},
                  {"formula", cpx(cd.sectional.Kv_l_formula)}};
    sc["Kv_m"] = {{"contraction", cpx(cd.sectional.Kv_m_contraction)},
                  {"formula", cpx(cd.sectional.Kv_m_formula)}};
    sc["Kh_lambda"] = {{"contraction", cpx(cd.sectional.Kh_lambda_contraction)},
                       {"formula", cpx(cd.sectional.Kh_lambda_formula)}};
    sc["Kh_mu"] = {{"contraction", cpx(cd.sectional.Kh_mu_contraction)},
                   {"formula", cpx(cd.sectional.Kh_mu_formula)}};
    rec["sectional"] = sc;
    json flags;
    for (const auto& name : classification_flags()) {
        const auto& f = pc.flags.at(name);
        flags[name] = {{"verdict", to_string(f.verdict)},
                       {"residual", f.residual},
                       {"witness", f.witness}};
    }
    rec["flags"] = flags;
    rec["trichotomy"] = {{"branch", pc.trichotomy}, {"residual", pc.trichotomy_residual}};
    json suites;
    suites["frames"] = frame_identity_residuals(gd, fb).worst();
    suites["prop21"] = prop21_residuals(gd, cd.tensors).worst();
    suites["prop42"] = prop42_residuals(gd, fb).worst();
    suites["prop43"] = prop43_residuals(gd, fb).worst();
    suites["hh-decomposition"] = hh_decomposition_residual(gd, fb, cd.tensors);
    rec["identity_residuals"] = suites;
    return rec;
}

int cmd_report(const RunConfig& cfg) {
    MetricSpec spec = resolve_metric(cfg);
    ToleranceConfig tol;
    tol.pass_tol = 1e-8;
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["metric"] = {{"name", spec.name}, {"source", spec.source}};
    doc["order"] = cfg.order;
    json pts = json::array();
    for (const Point& pt : resolve_points(spec, cfg)) pts.push_back(report_point(spec, pt, cfg, tol));
    doc["points"] = pts;

    if (cfg.format == "json") {
        emit(cfg, doc.dump(2));
    } else {
        std::ostringstream os;
        os << "metric: " << spec.name << "\n";
        for (const auto& rec : doc["points"]) {
            os << "point z=(" << fmt17(rec["point"]["z"][0]["re"]) << "+"
               << fmt17(rec["point"]["z"][0]["im"]) << "i, " << fmt17(rec["point"]["z"][1]["re"])
               << "+" << fmt17(rec["point"]["z"][1]["im"]) << "i)"
               << " eta=(" << fmt17(rec["point"]["eta"][0]["re"]) << "+"
               << fmt17(rec["point"]["eta"][0]["im"]) << "i, "
               << fmt17(rec["point"]["eta"][1]["re"]) << "+"
               << fmt17(rec["point"]["eta"][1]["im"]) << "i)\n";
            os << "  L=" << fmt17(rec["L"]) << "  F=" << fmt17(rec["F"]) << "\n";
            os << "  I=" << fmt17(rec["I"]["re"]) << "  K=" << fmt17(rec["K"]["re"])
               << "  W=" << fmt17(rec["W"]["re"]) << "\n";
            os << "  flags:";
            for (const auto& name : classification_flags())
                os << " " << name << "=" << rec["flags"][name]["verdict"].get<std::string>();
            os << "\n";
        }
        emit(cfg, os.str());
    }
    return kExitOk;
}

// ---- verify ----------------------------------------------------------------

double suite_residual(const std::string& suite, const MetricSpec& spec, const Point& pt,
                      int order) {
    if (suite == "homogeneity")
        return validate_homogeneity(spec, JetContext(3, pt.first, pt.second), 8).worst();

    GeometryData gd = compute_geometry(spec, JetContext(order, pt.first, pt.second));
    if (suite == "metric-compatibility") {
        TensorSlot dn{false, false}, dnb{false, true};
        JetTensor gt = JetTensor::matrix(gd.ft.g, dn, dnb);
        double gscale = 1.0, worst = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) gscale = std::max(gscale, std::abs(gd.ft.g[i][j].value()));
        for (int k = 0; k < 2; ++k) {
            for (const auto& c : covariant_h(gt, k, gd.conn).comp)
                worst = std::max(worst, std::abs(c.value()) / gscale);
            for (const auto& c : covariant_v(gt, k, gd.conn).comp)
                worst = std::max(worst, std::abs(c.value()) / gscale);
        }
        return worst;
    }
    if (suite == "prop22") {
        TensorSlot dn{false, false}, dnb{false, true};
        const WJet X = sqrt(gd.ft.L);
        Vec2 Xv, Xh, Xvb;
        for (int k = 0; k < 2; ++k) {
            Xv[k] = vertical(X, k);
            Xh[k] = adapted_delta(X, k, gd.conn.N);
            Xvb[k] = vertical_bar(X, k);
        }
        JetTensor Xvt = JetTensor::vector(Xv, dn);
        JetTensor Xht = JetTensor::vector(Xh, dn);
        JetTensor Xvbt = JetTensor::vector(Xvb, dnb);
        double worst = 0.0;
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j) {
                Complex lhs = covariant_h(Xvt, j, gd.conn).at({k}).value() -
                              covariant_v(Xht, k, gd.conn).at({j}).value();
                Complex rhs = 0.0;
                for (int i = 0; i < 2; ++i) rhs += gd.conn.C[i][j][k].value() * Xh[i].value();
                worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
                Complex lhs2 = covariant_h(Xvbt, j, gd.conn).at({k}).value() -
                               covariant_vbar(Xht, k, gd.conn).at({j}).value();
                Complex rhs2 = 0.0;
                for (int i = 0; i < 2; ++i)
                    rhs2 += vertical_bar(gd.conn.N[i][j], k).value() * Xv[i].value();
                worst = std::max(worst, std::abs(lhs2 - rhs2) / (1.0 + std::abs(rhs2)));
            }
        return worst;
    }

    FrameBundle fb = compute_frame(gd);
    if (suite == "frames") return frame_identity_residuals(gd, fb).worst();
    if (suite == "prop42") return prop42_residuals(gd, fb).worst();
    if (suite == "prop43") return prop43_residuals(gd, fb).worst();

    CurvatureTensors cv = curvature_tensors(gd);
    if (suite == "prop21") return prop21_residuals(gd, cv).worst();
    if (suite == "hh-decomposition") return hh_decomposition_residual(gd, fb, cv);
    if (suite == "bianchi") return bianchi_residuals(gd, cv).worst();
    if (suite == "theorem41") {
        auto invI = invariant_I(gd, fb, cv);
        return std::max({invI.structure_residual, invI.contraction_residual, invI.imag_defect,
                         theorem41_iii_residual(invI.I, gd)});
    }
    throw CliParseError("unknown suite '" + suite + "'");
}

const std::vector<std::string>& all_suites() {
    static const std::vector<std::string> s = {
        "homogeneity", "metric-compatibility", "prop21",           "prop22",  "frames",
        "prop42",      "prop43",               "hh-decomposition", "bianchi", "theorem41"};
    return s;
}

int cmd_verify(const RunConfig& cfg) {
    MetricSpec spec = resolve_metric(cfg);
    std::vector<std::string> suites;
    if (cfg.suite.empty())
        suites = all_suites();
    else {
        for (const std::string& s : split(cfg.suite, ','))
            if (std::find(all_suites().begin(), all_suites().end(), s) == all_suites().end())
                throw CliParseError("unknown suite '" + s + "'");
            else
                suites.push_back(s);
    }
    // Bianchi identities need one more derivative than the rest
    int order = cfg.order;
    if (std::find(suites.begin(), suites.end(), "bianchi") != suites.end())
        order = std::max(order, 6);

    std::vector<Point> pts = resolve_points(spec, cfg);
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["metric"] = {{"name", spec.name}, {"source", spec.source}};
    doc["tolerance"] = cfg.tol;
    bool all_pass = true;
    json out = json::array();
    std::ostringstream os;
    for (const std::string& s : suites) {
        double worst = 0.0;
        for (const Point& pt : pts) worst = std::max(worst, suite_residual(s, spec, pt, order));
        bool pass = worst <= cfg.tol;
        all_pass = all_pass && pass;
        out.push_back({{"suite", s}, {"max_residual", worst}, {"pass", pass}});
        os << (pass ? "PASS" : "FAIL") << "  " << s << "  max residual " << fmt17(worst) << "\n";
    }
    doc["suites"] = out;
    doc["pass"] = all_pass;
    emit(cfg, cfg.format == "json" ? doc.dump(2) : os.str());
    return all_pass ? kExitOk : kExitVerifyFail;
}

// ---- classify ----------------------------------------------------------------

int cmd_classify(const RunConfig& cfg) {
    MetricSpec spec = resolve_metric(cfg);
    ToleranceConfig tol;
    tol.pass_tol = 1e-8;
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["metric"] = {{"name", spec.name}, {"source", spec.source}};
    doc["seed"] = cfg.seed;

    ClassificationReport rep;
    if (!cfg.point.empty()) {
        rep.points.push_back(classify_point(spec, parse_point(cfg.point), cfg.order, tol));
        for (const auto& [name, f] : rep.points[0].flags) {
            auto& agg = rep.aggregate[name];
            switch (f.verdict) {
                case Verdict::Yes: ++agg.yes; break;
                case Verdict::No: ++agg.no; break;
                default: ++agg.indeterminate; break;
            }
            agg.worst_residual = f.residual;
        }
    } else {
        rep = aggregate_classify(spec, cfg.samples, cfg.seed, cfg.order, tol);
    }

    json pts = json::array();
    for (const auto& pc : rep.points) {
        json rec;
        rec["point"] = point_json(pc.point);
        for (const auto& name : classification_flags()) {
            const auto& f = pc.flags.at(name);
            rec[name] = {{"verdict", to_string(f.verdict)}, {"residual", f.residual}};
        }
        rec["trichotomy"] = {{"branch", pc.trichotomy}, {"residual", pc.trichotomy_residual}};
        rec["I"] = cpx(pc.I);
        rec["K"] = cpx(pc.K);
        rec["W"] = cpx(pc.W);
        rec["I_hcov_residual"] = pc.I_hcov_residual;
        rec["inconsistencies"] = pc.inconsistencies;
        pts.push_back(rec);
    }
    doc["points"] = pts;
    json agg;
    for (const auto& name : classification_flags()) {
        const auto& a = rep.aggregate.at(name);
        agg[name] = {{"unanimous", to_string(a.unanimous())},
                     {"yes", a.yes},
                     {"no", a.no},
                     {"indeterminate", a.indeterminate},
                     {"fraction_yes", a.fraction_yes()},
                     {"worst_residual", a.worst_residual}};
    }
    doc["aggregate"] = agg;

    if (cfg.format == "text") {
        std::ostringstream os;
        os << "metric: " << spec.name << "  points: " << rep.points.size() << "\n";
        for (const auto& name : classification_flags()) {
            const auto& a = rep.aggregate.at(name);
            os << "  " << name << ": " << to_string(a.unanimous()) << " (yes " << a.yes << ", no "
               << a.no << ", indeterminate " << a.indeterminate << ", worst residual "
               << fmt17(a.worst_residual) << ")\n";
        }
        emit(cfg, os.str());
    } else {
        emit(cfg, doc.dump(2));
    }
    return kExitOk;
}

// ---- scan ----------------------------------------------------------------

struct GridAxis {
    double lo = 0.0, hi = 0.0;
    int n = 1;
};

// "z1=0.2:0.8:4; z2=0:0.3:4; eta=1,0.5" -- real-axis grids for z1, z2
struct GridSpec {
    GridAxis a1, a2;
    std::array<Complex, 2> eta;
};

GridAxis parse_axis(const std::string& s) {
    auto parts = split(s, ':');
    if (parts.size() != 3) throw CliParseError("grid axis expects lo:hi:count, got '" + s + "'");
    GridAxis ax;
    ax.lo = std::stod(parts[0]);
    ax.hi = std::stod(parts[1]);
    ax.n = std::stoi(parts[2]);
    if (ax.n < 1) throw CliParseError("grid axis count must be >= 1");
    return ax;
}

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    bool has1 = false, has2 = false, hase = false;
    std::string norm = strip_ws(text);
    std::replace(norm.begin(), norm.end(), '|', ';');
    for (const std::string& part : split(norm, ';')) {
        if (part.empty()) continue;
        auto eq = part.find('=');
        if (eq == std::string::npos) throw CliParseError("expected key=val in grid spec");
        std::string key = part.substr(0, eq), val = part.substr(eq + 1);
        if (key == "z1") {
            g.a1 = parse_axis(val);
            has1 = true;
        } else if (key == "z2") {
            g.a2 = parse_axis(val);
            has2 = true;
        } else if (key == "eta") {
            auto vals = split(val, ',');
            if (vals.size() != 2) throw CliParseError("grid eta expects two components");
            g.eta = {parse_complex(vals[0]), parse_complex(vals[1])};
            hase = true;
        } else {
            throw CliParseError("unknown grid key '" + key + "'");
        }
    }
    if (!has1 || !has2 || !hase) throw CliParseError("grid spec needs z1=, z2= and eta=");
    return g;
}

int cmd_scan(const RunConfig& cfg) {
    if (cfg.grid.empty()) throw CliParseError("scan requires --grid");
    MetricSpec spec = resolve_metric(cfg);
    GridSpec grid = parse_grid(cfg.grid);

    std::ostringstream os;
    os << "z1_re,z1_im,z2_re,z2_im,eta1_re,eta1_im,eta2_re,eta2_im,"
          "I_re,I_im,K_re,K_im,W_re,W_im,"
          "Kv_m_re,Kv_m_im,Kh_lambda_re,Kh_lambda_im,Kh_mu_re,Kh_mu_im,error\n";
    auto coord = [](const GridAxis& a, int i) {
        return a.n == 1 ? a.lo : a.lo + (a.hi - a.lo) * i / (a.n - 1);
    };
    for (int i = 0; i < grid.a1.n; ++i)
        for (int j = 0; j < grid.a2.n; ++j) {
            Point pt{{Complex(coord(grid.a1, i)), Complex(coord(grid.a2, j))}, grid.eta};
            os << fmt17(pt.first[0].real()) << ",0," << fmt17(pt.first[1].real()) << ",0,"
               << fmt17(pt.second[0].real()) << "," << fmt17(pt.second[0].imag()) << ","
               << fmt17(pt.second[1].real()) << "," << fmt17(pt.second[1].imag()) << ",";
            try {
                GeometryData gd = compute_geometry(spec, JetContext(cfg.order, pt.first, pt.second));
                FrameBundle fb = compute_frame(gd);
                CurvatureData cd = compute_curvature(gd, fb);
                auto put = [&](Complex c) { os << fmt17(c.real()) << "," << fmt17(c.imag()) << ","; };
                put(cd.inv_I.I.value());
                put(cd.inv_K.value());
                put(cd.inv_W.value());
                put(cd.sectional.Kv_m_contraction);
                put(cd.sectional.Kh_lambda_contraction);
                put(cd.sectional.Kh_mu_contraction);
                os << "\n";
            } catch (const DomainViolation& e) {
                os << ",,,,,,,,,,,," << "\"" << e.what() << "\"\n";
            }
        }
    emit(cfg, os.str());
    return kExitOk;
}

// ---- fd-check --------------------------------------------------------------

int cmd_fd_check(const RunConfig& cfg) {
    MetricSpec spec = resolve_metric(cfg);
    std::vector<Point> pts = resolve_points(spec, cfg);
    const double h = 1e-5;

    auto Lval = [&](const std::array<Complex, 2>& z, const std::array<Complex, 2>& eta) {
        return eval_L_jet(spec, JetContext(2, z, eta)).value();
    };
    // Wirtinger first derivative of f at x in slot k: holo ? d/dv : d/dvbar
    auto wirt = [&](auto&& f, std::array<Complex, 2> x, int k, bool holo) {
        auto xp = x, xm = x, yp = x, ym = x;
        xp[k] += h;
        xm[k] -= h;
        yp[k] += Complex(0, h);
        ym[k] -= Complex(0, h);
        Complex dx = (f(xp) - f(xm)) / (2 * h);
        Complex dy = (f(yp) - f(ym)) / (2 * h);
        return holo ? (dx - Complex(0, 1) * dy) * 0.5 : (dx + Complex(0, 1) * dy) * 0.5;
    };

    double worst_g = 0.0, worst_N = 0.0, worst_L = 0.0;
    for (const Point& pt : pts) {
        GeometryData gd = compute_geometry(spec, JetContext(cfg.order, pt.first, pt.second));
        // g_{i jbar} = d^2 L / d eta^i d etabar^j
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                auto inner = [&](const std::array<Complex, 2>& e) {
                    return wirt([&](const std::array<Complex, 2>& ee) { return Lval(pt.first, ee); },
                                e, i, true);
                };
                Complex fd = wirt(inner, pt.second, j, false);
                Complex ad = gd.ft.g[i][j].value();
                worst_g = std::max(worst_g, std::abs(fd - ad) / (1.0 + std::abs(ad)));
            }
        // N^i_k = g^{mbar i} (d g_{l mbar} / d z^k) eta^l
        auto gmat = [&](const std::array<Complex, 2>& z) {
            auto ft = fundamental_tensor(eval_L_jet(spec, JetContext(2, z, pt.second)),
                                         JetContext(2, z, pt.second));
            std::array<Complex, 4> out;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) out[2 * i + j] = ft.g[i][j].value();
            return out;
        };
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) {
                Complex fd = 0.0;
                for (int l = 0; l < 2; ++l)
                    for (int m = 0; m < 2; ++m) {
                        Complex dg = wirt([&](const std::array<Complex, 2>& z) {
                                              return gmat(z)[2 * l + m];
                                          },
                                          pt.first, k, true);
                        fd += gd.ft.inv[m][i].value() * dg * pt.second[l];
                    }
                Complex ad = gd.conn.N[i][k].value();
                worst_N = std::max(worst_N, std::abs(fd - ad) / (1.0 + std::abs(ad)));
            }
        // L^i_{jk} = d. _j N^i_k
        auto Nmat = [&](const std::array<Complex, 2>& e) {
            JetContext c(3, pt.first, e);
            auto ft = fundamental_tensor(eval_L_jet(spec, c), c);
            auto conn = chern_finsler(ft, c);
            std::array<Complex, 4> out;
            for (int i = 0; i < 2; ++i)
                for (int k = 0; k < 2; ++k) out[2 * i + k] = conn.N[i][k].value();
            return out;
        };
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) {
                    Complex fd = wirt([&](const std::array<Complex, 2>& e) {
                                          return Nmat(e)[2 * i + k];
                                      },
                                      pt.second, j, true);
                    Complex ad = gd.conn.L[i][j][k].value();
                    worst_L = std::max(worst_L, std::abs(fd - ad) / (1.0 + std::abs(ad)));
                }
    }

    bool pass = worst_g <= cfg.tol && worst_N <= cfg.tol && worst_L <= cfg.tol;
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["metric"] = {{"name", spec.name}, {"source", spec.source}};
    doc["step"] = h;
    doc["tolerance"] = cfg.tol;
    doc["max_relative_deviation"] = {{"g", worst_g}, {"N", worst_N}, {"L", worst_L}};
    doc["pass"] = pass;
    if (cfg.format == "json") {
        emit(cfg, doc.dump(2));
    } else {
        std::ostringstream os;
        os << (pass ? "PASS" : "FAIL") << "  fd-check " << spec.name << "  g " << fmt17(worst_g)
           << "  N " << fmt17(worst_N) << "  L " << fmt17(worst_L) << "\n";
        emit(cfg, os.str());
    }
    return pass ? kExitOk : kExitVerifyFail;
}

// ---- list ----------------------------------------------------------------

int cmd_list(const RunConfig& cfg) {
    std::ostringstream os;
    os << "name                 parameters       domain\n";
    for (const MetricSpec& m : list_builtins()) {
        std::string params = m.name == "antonelli-shimada" ? "sigma (expr/preset)" : "-";
        std::string dom;
        for (const auto& d : m.domain) {
            if (!dom.empty()) dom += " and ";
            dom += d.description;
        }
        if (dom.empty()) dom = "all of C^2 x (C^2 \\ 0)";
        os << m.name << std::string(m.name.size() < 21 ? 21 - m.name.size() : 1, ' ')
           << params << std::string(params.size() < 17 ? 17 - params.size() : 1, ' ') << dom
           << "\n";
    }
    emit(cfg, os.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2-dimensional complex Finsler geometry laboratory"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--metric", cfg.metric, "builtin:NAME or @file");
        cmd->add_option("--param", cfg.params, "metric parameter K=V (repeatable)");
        cmd->add_option("--order", cfg.order, "truncation order")->check(CLI::Range(4, 10));
        cmd->add_option("--tol", cfg.tol, "residual tolerance");
        cmd->add_option("--seed", cfg.seed, "sampling seed");
        cmd->add_option("--samples", cfg.samples, "number of sample points");
        cmd->add_option("--point", cfg.point, "point 'z=a+bi,c+di; eta=e+fi,g+hi'");
        cmd->add_option("--grid", cfg.grid, "grid 'z1=lo:hi:n; z2=lo:hi:n; eta=c1,c2'");
        cmd->add_option("--format", cfg.format, "json|csv|text")
            ->check(CLI::IsMember({"json", "csv", "text"}));
        cmd->add_option("--out", cfg.out, "output file (default stdout)");
        cmd->add_option("--suite", cfg.suite, "verify suite filter (comma separated)");
    };

    CLI::App* list = app.add_subcommand("list", "list built-in metrics");
    CLI::App* report = app.add_subcommand("report", "full geometry report at point(s)");
    CLI::App* verify = app.add_subcommand("verify", "run identity suites");
    CLI::App* classify = app.add_subcommand("classify", "classification flags");
    CLI::App* scan = app.add_subcommand("scan", "CSV invariants over a grid");
    CLI::App* fd = app.add_subcommand("fd-check", "AD vs finite differences");
    for (CLI::App* c : {list, report, verify, classify, scan, fd}) add_common(c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitParse;
    }

    try {
        if (list->parsed()) return cmd_list(cfg);
        if (report->parsed()) return cmd_report(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (classify->parsed()) return cmd_classify(cfg);
        if (scan->parsed()) return cmd_scan(cfg);
        if (fd->parsed()) return cmd_fd_check(cfg);
    } catch (const CliParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const OrderBudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const DomainViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const BranchViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitParse;
}

#include "eikonal/frames.hpp"
#include "eikonal/log.hpp"
#include "eikonal/oracle.hpp"
#include "eikonal/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace eikonal;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { ok = 0, invalid = 1, pipeline = 2, oracle_failed = 3 };

struct Options {
    std::string input;
    std::string output;
    std::string manifest;
    std::string horizon;
    unsigned jobs = 1;
    std::string kind = "a";
    std::string format = "json";
    std::string h;
    double tol = 2e-2;
    std::string dump_hydra;
    bool inject_corruption = false;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool looks_like_json(const std::string& text) {
    auto p = text.find_first_not_of(" \t\r\n");
    return p != std::string::npos && text[p] == '{';
}

GraphSpec read_spec(const std::string& text, const std::string& horizon) {
    if (horizon.empty()) return parse_graph(text);
    std::istringstream in(text);
    std::string line, kept;
    while (std::getline(in, line)) {
        std::istringstream words(line);
        std::string first;
        words >> first;
        if (first != "horizon") kept += line + "\n";
    }
    kept += "horizon " + horizon + "\n";
    return parse_graph(kept);
}

// The loaded input at whatever stage it was saved.
struct Input {
    std::string kind;  // graph, source-form, canon-a, canon-g, frame
    GraphSpec spec;
    std::optional<SourceParametricForm> source;
    std::optional<CanonicalFormA> a;
    std::optional<GeometricForm> g;
    std::optional<FrameGraph> frame;
};

Input load(const Options& opt) {
    const std::string text = read_text(opt.input);
    Input in;
    if (!looks_like_json(text)) {
        in.kind = "graph";
        in.spec = read_spec(text, opt.horizon);
        return in;
    }
    in.kind = artifact_kind(text);
    if (!opt.horizon.empty() && in.kind != "frame") {
        throw FormatError("--horizon only applies to graph descriptions");
    }
    if (in.kind == "source-form") {
        in.source = read_source_form(text);
        in.spec = in.source->spec;
    } else if (in.kind == "canon-a") {
        in.a = read_canonical_a(text);
        in.spec = in.a->spec;
    } else if (in.kind == "canon-g") {
        in.g = read_geometric(text);
        in.spec = in.g->spec;
    } else if (in.kind == "frame") {
        in.frame = read_frame(text);
    } else {
        throw FormatError("unsupported artifact '" + in.kind + "'");
    }
    return in;
}

SourceParametricForm& need_source(Input& in, const Options& opt) {
    if (!in.source) {
        if (in.kind != "graph") throw FormatError("a " + in.kind + " artifact cannot be taken back to the source form");
        AssembleOptions a;
        a.jobs = opt.jobs;
        in.source = assemble_source_form(in.spec, a);
    }
    return *in.source;
}

CanonicalFormA& need_a(Input& in, const Options& opt) {
    if (!in.a) in.a = merge_chains(need_source(in, opt));
    return *in.a;
}

GeometricForm& need_g(Input& in, const Options& opt) {
    if (!in.g) in.g = geometric_form(need_source(in, opt));
    return *in.g;
}

std::vector<std::string> outputs;

void emit(const Options& opt, const std::string& text) {
    if (opt.output.empty() || opt.output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.output, std::ios::binary);
    if (!out) throw FormatError("cannot write " + opt.output);
    out << text;
    outputs.push_back(opt.output);
}

void write_manifest(const Options& opt, const std::string& command) {
    if (opt.manifest.empty()) return;
    nlohmann::ordered_json m;
    m["tool"] = "eikonal";
    m["version"] = kVersion;
    m["command"] = command;
    m["input"] = opt.input;
    nlohmann::ordered_json p;
    if (!opt.horizon.empty()) p["horizon"] = opt.horizon;
    if (command == "frame") p["kind"] = opt.kind;
    if (command == "export") p["format"] = opt.format;
    if (command == "oracle") {
        p["h"] = opt.h;
        p["tol"] = opt.tol;
    }
    p["jobs"] = opt.jobs;
    m["parameters"] = p;
    m["outputs"] = outputs;
    std::ofstream out(opt.manifest, std::ios::binary);
    if (!out) throw FormatError("cannot write " + opt.manifest);
    out << m.dump(2) << "\n";
}

int cmd_validate(const Options& opt) {
    Input in = load(opt);
    if (in.kind != "graph") throw FormatError("validate expects a graph description");
    const auto& g = in.spec.graph;
    std::ostringstream out;
    out << "valid: " << g.vertices().size() << " vertices, " << g.edges().size() << " edges, horizon "
        << to_string(in.spec.control.horizon) << "\n";
    for (auto s : in.spec.control.sigma) {
        out << "source " << g.vertex(s).id << ": filling time " << to_string(filling_time(g, s)) << "\n";
    }
    emit(opt, out.str());
    return ok;
}

int cmd_source_form(const Options& opt) {
    Input in = load(opt);
    if (!opt.dump_hydra.empty()) {
        std::vector<std::vector<Ray>> rays;
        for (auto s : in.spec.control.sigma) {
            auto list = trace_rays(in.spec.graph, s, in.spec.control.horizon);
            for (auto& r : list) r.source = rays.size();
            rays.push_back(std::move(list));
        }
        std::ofstream out(opt.dump_hydra, std::ios::binary);
        if (!out) throw FormatError("cannot write " + opt.dump_hydra);
        out << write_hydra(in.spec, rays);
        outputs.push_back(opt.dump_hydra);
    }
    emit(opt, write_source_form(need_source(in, opt)));
    return ok;
}

int cmd_canon_a(const Options& opt) {
    Input in = load(opt);
    emit(opt, write_canonical_a(need_a(in, opt)));
    return ok;
}

int cmd_canon_g(const Options& opt) {
    Input in = load(opt);
    emit(opt, write_geometric(need_g(in, opt)));
    return ok;
}

int cmd_frame(const Options& opt) {
    Input in = load(opt);
    FrameGraph f;
    if (in.frame) {
        const bool want_a = opt.kind == "a";
        if (want_a != (in.frame->kind == FrameGraph::Kind::algebraic)) throw FormatError("frame artifact has the other kind");
        f = *in.frame;
    } else {
        f = opt.kind == "a" ? build_frame_algebraic(need_a(in, opt)) : build_frame_geometric(need_g(in, opt));
    }
    auto problems = check_frame(f);
    if (!problems.empty()) throw PipelineError("frame is inconsistent: " + problems.front());
    emit(opt, write_frame(f));
    return ok;
}

int cmd_check(const Options& opt) {
    Input in = load(opt);
    auto& source = need_source(in, opt);
    auto verdict = check_ordinary(source);
    auto fa = build_frame_algebraic(need_a(in, opt));
    auto fg = build_frame_geometric(need_g(in, opt));
    if (opt.inject_corruption) {
        // test hook: perturb one coordinate of the geometric frame
        if (!fg.edges.empty() && !fg.edges[0].coords.empty() && !fg.edges[0].coords[0].empty()) {
            fg.edges[0].coords[0][0].intercept += Rational(1, 7);
        } else if (!fg.vertices.empty()) {
            fg.vertices[0].coords.emplace_back();
        }
    }
    std::string why;
    auto iso = frame_isometry(fa, fg, &why);
    std::ostringstream out;
    out << "ordinary: " << (verdict.ordinary ? "yes" : "no") << "\n";
    if (!verdict.ordinary) {
        out << "  family " << verdict.family << ": nort class of " << verdict.nort_class.size() << " terms differs from supp class of "
            << verdict.supp_class.size() << " terms\n";
    }
    out << "isometric: " << (iso ? "yes" : "no") << "\n";
    if (!iso) out << "  " << why << "\n";
    const bool holds = !verdict.ordinary || iso.has_value();
    out << "implication: " << (holds ? "holds" : "violated") << "\n";
    emit(opt, out.str());
    return holds ? ok : pipeline;
}

int cmd_oracle(const Options& opt) {
    Input in = load(opt);
    Rational h;
    try {
        h = parse_rational(opt.h);
    } catch (const std::exception& e) {
        throw FormatError("--h: " + std::string(e.what()));
    }
    auto report = compare(need_source(in, opt), h, opt.jobs);
    emit(opt, report.csv());
    const double err = report.max_eigenvalue_error();
    std::cerr << "max eigenvalue error " << err << ", max angle " << report.max_angle() << ", tolerance " << opt.tol << "\n";
    return err < opt.tol && report.max_angle() < opt.tol ? ok : oracle_failed;
}

int cmd_export(const Options& opt) {
    const std::string text = read_text(opt.input);
    if (!looks_like_json(text)) throw FormatError("export expects a JSON artifact");
    const auto kind = artifact_kind(text);
    if (opt.format == "dot") {
        if (kind != "frame") throw FormatError("DOT export needs a frame artifact");
        emit(opt, frame_dot(read_frame(text)));
    } else if (kind == "frame") {
        emit(opt, write_frame(read_frame(text)));
    } else if (kind == "source-form") {
        emit(opt, write_source_form(read_source_form(text)));
    } else if (kind == "canon-a") {
        emit(opt, write_canonical_a(read_canonical_a(text)));
    } else if (kind == "canon-g") {
        emit(opt, write_geometric(read_geometric(text)));
    } else {
        throw FormatError("unsupported artifact '" + kind + "'");
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eikonal algebras of metric graphs: canonical forms, frames and a wave-solver check"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Options opt;

    auto common = [&](CLI::App* sub) {
        sub->add_option("input", opt.input, "graph description or JSON artifact")->required();
        sub->add_option("-o,--output", opt.output, "output file (default stdout)");
        sub->add_option("--horizon", opt.horizon, "override the horizon T (p/q)");
        sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::Range(1u, 256u));
        sub->add_option("--manifest", opt.manifest, "write a run manifest here");
    };

    auto* validate = app.add_subcommand("validate", "check a graph description");
    auto* source = app.add_subcommand("source-form", "source parametric form");
    auto* canon_a = app.add_subcommand("canon-a", "canonical form A");
    auto* canon_g = app.add_subcommand("canon-g", "geometric canonical form");
    auto* frame = app.add_subcommand("frame", "frame graph");
    auto* check = app.add_subcommand("check", "ordinariness and frame isometry");
    auto* oracle = app.add_subcommand("oracle", "compare against a finite-difference wave solver");
    auto* exporter = app.add_subcommand("export", "render an artifact");
    for (auto* sub : {validate, source, canon_a, canon_g, frame, check, oracle, exporter}) common(sub);
    source->add_option("--dump-hydra", opt.dump_hydra, "also write the ray set as JSON");
    frame->add_option("--kind", opt.kind, "a or g")->check(CLI::IsMember({"a", "g"}));
    check->add_flag("--inject-corruption", opt.inject_corruption)->group("");
    oracle->set_help_flag("--help", "Print this help message and exit");
    oracle->add_option("--h", opt.h, "grid step p/q")->required();
    oracle->add_option("--tol", opt.tol, "tolerance on eigenvalues and angles");
    exporter->add_option("--format", opt.format, "dot or json")->check(CLI::IsMember({"dot", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : invalid;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    try {
        int code = ok;
        if (chosen == validate) code = cmd_validate(opt);
        else if (chosen == source) code = cmd_source_form(opt);
        else if (chosen == canon_a) code = cmd_canon_a(opt);
        else if (chosen == canon_g) code = cmd_canon_g(opt);
        else if (chosen == frame) code = cmd_frame(opt);
        else if (chosen == check) code = cmd_check(opt);
        else if (chosen == oracle) code = cmd_oracle(opt);
        else code = cmd_export(opt);
        write_manifest(opt, command);
        return code;
    } catch (const ValidationError& e) {
        for (const auto& d : e.diagnostics()) {
            std::cerr << "error";
            if (d.line) std::cerr << " (line " << d.line << ")";
            std::cerr << ": " << d.message;
            if (!d.subject.empty()) std::cerr << " [" << d.subject << "]";
            std::cerr << "\n";
        }
        return invalid;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return invalid;
    } catch (const OracleError& e) {
        std::cerr << "oracle error: " << e.what() << "\n";
        return oracle_failed;
    } catch (const PipelineError& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return pipeline;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pipeline;
    }
}

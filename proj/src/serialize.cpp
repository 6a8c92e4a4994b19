#include "eikonal/serialize.hpp"

#include <json.hpp>

#include <sstream>

namespace eikonal {

using Json = nlohmann::ordered_json;

namespace {

Json rat(const Rational& q) { return to_string(q); }

Rational rat(const Json& j) {
    if (!j.is_string()) throw FormatError("expected a rational string, got " + j.dump());
    try {
        return parse_rational(j.get<std::string>());
    } catch (const std::exception& e) {
        throw FormatError(std::string("bad rational: ") + e.what());
    }
}

Json rats(const RationalVector& v) {
    Json out = Json::array();
    for (const auto& q : v) out.push_back(rat(q));
    return out;
}

RationalVector rats(const Json& j) {
    RationalVector out;
    for (const auto& q : j) out.push_back(rat(q));
    return out;
}

Json point(const MetricGraph& g, const GraphPoint& p) {
    if (p.is_vertex()) return Json{{"vertex", g.vertex(p.index).id}};
    return Json{{"edge", g.edge(p.index).id}, {"offset", rat(p.offset)}};
}

GraphPoint point(const MetricGraph& g, const Json& j) {
    if (j.contains("vertex")) return GraphPoint::at_vertex(g.vertex_index(j.at("vertex").get<std::string>()));
    return GraphPoint::on_edge(g, g.edge_index(j.at("edge").get<std::string>()), rat(j.at("offset")));
}

Json points(const MetricGraph& g, const std::vector<GraphPoint>& ps) {
    Json out = Json::array();
    for (const auto& p : ps) out.push_back(point(g, p));
    return out;
}

std::vector<GraphPoint> points(const MetricGraph& g, const Json& j) {
    std::vector<GraphPoint> out;
    for (const auto& p : j) out.push_back(point(g, p));
    return out;
}

Json affine(const AffineTime& t) { return Json{{"slope", t.slope}, {"intercept", rat(t.intercept)}}; }

AffineTime affine(const Json& j) {
    AffineTime t{j.at("slope").get<int>(), rat(j.at("intercept"))};
    if (t.slope != 1 && t.slope != -1) throw FormatError("slope must be +1 or -1");
    return t;
}

Json terms(const std::vector<std::vector<EikonalTerm>>& per_source) {
    Json out = Json::array();
    for (const auto& list : per_source) {
        Json src = Json::array();
        for (const auto& t : list) {
            Json term = affine(t.tau);
            term["beta"] = rats(t.projector.beta);
            src.push_back(std::move(term));
        }
        out.push_back(std::move(src));
    }
    return out;
}

std::vector<std::vector<EikonalTerm>> terms(const Json& j) {
    std::vector<std::vector<EikonalTerm>> out;
    for (const auto& src : j) {
        auto& list = out.emplace_back();
        for (const auto& t : src) list.push_back(EikonalTerm{affine(t), ProjectorVec::from(rats(t.at("beta")))});
    }
    return out;
}

Json matrix(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        out.push_back(std::move(row));
    }
    return out;
}

Matrix matrix(const Json& j) {
    const auto n = static_cast<Eigen::Index>(j.size());
    Matrix m(n, n == 0 ? 0 : static_cast<Eigen::Index>(j[0].size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != m.cols()) throw FormatError("ragged matrix");
        for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

Json irreps(const std::vector<IrrepBlock>& blocks) {
    Json out = Json::array();
    for (const auto& b : blocks) out.push_back(Json{{"dim", b.dim}, {"multiplicity", b.multiplicity}});
    return out;
}

std::vector<IrrepBlock> irreps(const Json& j) {
    std::vector<IrrepBlock> out;
    for (const auto& b : j) out.push_back(IrrepBlock{b.at("dim").get<std::size_t>(), b.at("multiplicity").get<std::size_t>()});
    return out;
}

Json header(const char* kind, const GraphSpec& spec) {
    Json out;
    out["artifact"] = kind;
    out["graph"] = serialize_graph(spec);
    Json sources = Json::array();
    for (auto s : spec.control.sigma) sources.push_back(spec.graph.vertex(s).id);
    out["sources"] = std::move(sources);
    return out;
}

Json parse(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw FormatError(std::string("not JSON: ") + e.what());
    }
}

Json open(const std::string& text, const char* kind, GraphSpec* spec) {
    Json j = parse(text);
    if (!j.is_object() || j.value("artifact", std::string()) != kind) {
        throw FormatError(std::string("expected a ") + kind + " artifact");
    }
    if (spec) *spec = parse_graph(j.at("graph").get<std::string>());
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// nlohmann's exceptions and out_of_range from index lookups become FormatError
template <class F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw FormatError(e.what());
    } catch (const std::out_of_range& e) {
        throw FormatError(e.what());
    }
}

}  // namespace

std::string artifact_kind(const std::string& text) {
    Json j = parse(text);
    return j.is_object() ? j.value("artifact", std::string()) : std::string();
}

std::string write_source_form(const SourceParametricForm& form) {
    const auto& g = form.spec.graph;
    Json out = header("source-form", form.spec);
    Json fams = Json::array();
    for (const auto& f : form.families) {
        Json cells = Json::array();
        for (const auto& c : f.family.cells) {
            cells.push_back(Json{{"edge", g.edge(c.edge).id}, {"lo", rat(c.span.lo)}, {"hi", rat(c.span.hi)},
                                 {"reversed", c.reversed}});
        }
        fams.push_back(Json{{"length", rat(f.family.length)}, {"cells", std::move(cells)}, {"terms", terms(f.terms)}});
    }
    out["families"] = std::move(fams);
    out["critical"] = points(g, form.critical);
    return dump(out);
}

SourceParametricForm read_source_form(const std::string& text) {
    return guarded([&] {
        SourceParametricForm form;
        Json j = open(text, "source-form", &form.spec);
        const auto& g = form.spec.graph;
        for (const auto& f : j.at("families")) {
            FamilyForm ff;
            ff.family.length = rat(f.at("length"));
            for (const auto& c : f.at("cells")) {
                ff.family.cells.push_back(Cell{g.edge_index(c.at("edge").get<std::string>()),
                                               Interval{rat(c.at("lo")), rat(c.at("hi"))}, c.at("reversed").get<bool>()});
            }
            ff.terms = terms(f.at("terms"));
            if (ff.terms.size() != form.spec.control.sigma.size()) throw FormatError("term lists do not match the sources");
            form.families.push_back(std::move(ff));
        }
        form.critical = points(g, j.at("critical"));
        return form;
    });
}

std::string write_canonical_a(const CanonicalFormA& form) {
    Json out = header("canon-a", form.spec);
    Json blocks = Json::array();
    for (const auto& b : form.blocks) {
        Json ts = Json::array();
        for (const auto& t : b.terms) {
            Json term = affine(t.tau);
            term["source"] = t.source;
            term["projector"] = matrix(t.projector);
            ts.push_back(std::move(term));
        }
        Json pieces = Json::array();
        for (const auto& p : b.pieces) {
            pieces.push_back(Json{{"family", p.family},
                                  {"nort_class", p.nort_class},
                                  {"reversed", p.reversed},
                                  {"offset", rat(p.offset)},
                                  {"length", rat(p.length)}});
        }
        blocks.push_back(Json{{"length", rat(b.length)},
                              {"kappa", b.kappa},
                              {"terms", std::move(ts)},
                              {"pieces", std::move(pieces)},
                              {"boundary_minus", irreps(b.minus)},
                              {"boundary_plus", irreps(b.plus)}});
    }
    out["blocks"] = std::move(blocks);
    out["longest_word"] = form.longest_word;
    return dump(out);
}

CanonicalFormA read_canonical_a(const std::string& text) {
    return guarded([&] {
        CanonicalFormA form;
        Json j = open(text, "canon-a", &form.spec);
        for (const auto& b : j.at("blocks")) {
            ABlock block;
            block.length = rat(b.at("length"));
            block.kappa = b.at("kappa").get<std::size_t>();
            for (const auto& t : b.at("terms")) {
                BlockTerm term{t.at("source").get<std::size_t>(), affine(t), matrix(t.at("projector"))};
                if (term.source >= form.spec.control.sigma.size()) throw FormatError("term source out of range");
                if (term.projector.rows() != static_cast<Eigen::Index>(block.kappa) ||
                    term.projector.cols() != static_cast<Eigen::Index>(block.kappa)) {
                    throw FormatError("projector size differs from kappa");
                }
                block.terms.push_back(std::move(term));
            }
            for (const auto& p : b.at("pieces")) {
                block.pieces.push_back(BlockPiece{p.at("family").get<std::size_t>(), p.at("nort_class").get<std::size_t>(),
                                                  p.at("reversed").get<bool>(), rat(p.at("offset")), rat(p.at("length"))});
            }
            block.minus = irreps(b.at("boundary_minus"));
            block.plus = irreps(b.at("boundary_plus"));
            form.blocks.push_back(std::move(block));
        }
        form.longest_word = j.at("longest_word").get<std::size_t>();
        return form;
    });
}

std::string write_geometric(const GeometricForm& form) {
    const auto& g = form.spec.graph;
    Json out = header("canon-g", form.spec);
    Json fams = Json::array();
    for (const auto& f : form.families) {
        Json cells = Json::array();
        for (const auto& chain : f.cells) {
            Json pieces = Json::array();
            for (const auto& p : chain) {
                pieces.push_back(Json{{"edge", g.edge(p.edge).id}, {"lo", rat(p.span.lo)}, {"hi", rat(p.span.hi)},
                                      {"reversed", p.reversed}});
            }
            cells.push_back(std::move(pieces));
        }
        fams.push_back(Json{{"length", rat(f.length)}, {"cells", std::move(cells)}, {"terms", terms(f.terms)}, {"origin", f.origin}});
    }
    out["families"] = std::move(fams);
    out["critical"] = points(g, form.critical);
    out["diagnostics"] = form.diagnostics;
    return dump(out);
}

GeometricForm read_geometric(const std::string& text) {
    return guarded([&] {
        GeometricForm form;
        Json j = open(text, "canon-g", &form.spec);
        const auto& g = form.spec.graph;
        for (const auto& f : j.at("families")) {
            GFamily fam;
            fam.length = rat(f.at("length"));
            for (const auto& chain : f.at("cells")) {
                auto& pieces = fam.cells.emplace_back();
                for (const auto& p : chain) {
                    pieces.push_back(CellPiece{g.edge_index(p.at("edge").get<std::string>()),
                                               Interval{rat(p.at("lo")), rat(p.at("hi"))}, p.at("reversed").get<bool>()});
                }
            }
            fam.terms = terms(f.at("terms"));
            if (fam.terms.size() != form.spec.control.sigma.size()) throw FormatError("term lists do not match the sources");
            fam.origin = f.at("origin").get<std::vector<std::size_t>>();
            form.families.push_back(std::move(fam));
        }
        form.critical = points(g, j.at("critical"));
        form.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
        return form;
    });
}

std::string write_frame(const FrameGraph& frame) {
    Json out;
    out["artifact"] = "frame";
    out["kind"] = frame.kind == FrameGraph::Kind::algebraic ? "a" : "g";
    out["sources"] = frame.sources;
    Json vs = Json::array();
    for (const auto& v : frame.vertices) {
        Json coords = Json::array();
        for (const auto& c : v.coords) coords.push_back(rats(c));
        Json ends = Json::array();
        for (const auto& e : v.ends) ends.push_back(Json{{"edge", e.edge}, {"at_end", e.at_end}});
        vs.push_back(Json{{"id", v.id}, {"coords", std::move(coords)}, {"ends", std::move(ends)}});
    }
    Json es = Json::array();
    for (const auto& e : frame.edges) {
        Json coords = Json::array();
        for (const auto& list : e.coords) {
            Json src = Json::array();
            for (const auto& t : list) src.push_back(affine(t));
            coords.push_back(std::move(src));
        }
        es.push_back(Json{{"id", e.id},
                          {"length", rat(e.length)},
                          {"tail", e.tail},
                          {"head", e.head},
                          {"coords", std::move(coords)},
                          {"origin", e.origin}});
    }
    out["vertices"] = std::move(vs);
    out["edges"] = std::move(es);
    return dump(out);
}

FrameGraph read_frame(const std::string& text) {
    return guarded([&] {
        Json j = open(text, "frame", nullptr);
        FrameGraph f;
        const auto kind = j.at("kind").get<std::string>();
        if (kind != "a" && kind != "g") throw FormatError("frame kind must be a or g");
        f.kind = kind == "a" ? FrameGraph::Kind::algebraic : FrameGraph::Kind::geometric;
        f.sources = j.at("sources").get<std::vector<std::string>>();
        for (const auto& v : j.at("vertices")) {
            FrameVertex fv;
            fv.id = v.at("id").get<std::string>();
            for (const auto& c : v.at("coords")) fv.coords.push_back(rats(c));
            for (const auto& e : v.at("ends")) fv.ends.push_back(FrameEnd{e.at("edge").get<std::size_t>(), e.at("at_end").get<bool>()});
            f.vertices.push_back(std::move(fv));
        }
        for (const auto& e : j.at("edges")) {
            FrameEdge fe;
            fe.id = e.at("id").get<std::string>();
            fe.length = rat(e.at("length"));
            fe.tail = e.at("tail").get<std::size_t>();
            fe.head = e.at("head").get<std::size_t>();
            if (fe.tail >= f.vertices.size() || fe.head >= f.vertices.size()) throw FormatError("edge endpoint out of range");
            for (const auto& src : e.at("coords")) {
                auto& list = fe.coords.emplace_back();
                for (const auto& t : src) list.push_back(affine(t));
            }
            fe.origin = e.at("origin").get<std::size_t>();
            f.edges.push_back(std::move(fe));
        }
        return f;
    });
}

std::string write_hydra(const GraphSpec& spec, const std::vector<std::vector<Ray>>& rays) {
    const auto& g = spec.graph;
    Json out = header("hydra", spec);
    Json per_source = Json::array();
    for (const auto& list : rays) {
        Json rs = Json::array();
        for (const auto& ray : list) {
            Json hops = Json::array();
            Rational length = 0;
            for (const auto& h : ray.hops) {
                hops.push_back(Json{{"edge", g.edge(h.edge).id}, {"forward", h.forward}});
                length += g.edge(h.edge).length;
            }
            rs.push_back(Json{{"source", g.vertex(spec.control.sigma.at(ray.source)).id},
                              {"hops", std::move(hops)},
                              {"amplitude", rat(ray.amplitude)},
                              {"length", rat(length)},
                              {"last_start", rat(ray.last_start)}});
        }
        per_source.push_back(std::move(rs));
    }
    out["rays"] = std::move(per_source);
    return dump(out);
}

namespace {

std::string coord_label(const Coordinates& c) {
    std::string out;
    for (std::size_t s = 0; s < c.size(); ++s) {
        if (s) out += " ";
        out += "{";
        for (std::size_t k = 0; k < c[s].size(); ++k) out += (k ? "," : "") + to_string(c[s][k]);
        out += "}";
    }
    return out;
}

}  // namespace

std::string frame_dot(const FrameGraph& frame) {
    std::ostringstream out;
    out << "graph frame_" << (frame.kind == FrameGraph::Kind::algebraic ? "a" : "g") << " {\n";
    for (const auto& v : frame.vertices) out << "  \"" << v.id << "\" [label=\"" << v.id << "\\n" << coord_label(v.coords) << "\"];\n";
    for (const auto& e : frame.edges) {
        out << "  \"" << frame.vertices[e.tail].id << "\" -- \"" << frame.vertices[e.head].id << "\" [label=\"" << e.id
            << " length " << to_string(e.length);
        for (std::size_t s = 0; s < e.coords.size(); ++s) {
            out << "\\n" << (s < frame.sources.size() ? frame.sources[s] : std::to_string(s)) << ":";
            for (const auto& t : e.coords[s]) {
                auto r = t.range(e.length);
                out << " [" << to_string(r.lo) << "," << to_string(r.hi) << "]";
            }
        }
        out << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace eikonal

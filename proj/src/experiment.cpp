#include "pseudoq/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>

#include "pseudoq/error.hpp"
#include "pseudoq/parallel.hpp"

namespace pseudoq {

namespace {

const std::set<std::string, std::less<>> kPipelineKeys = {"alpha", "alpha1", "alpha_cluster", "beta", "delta",
                                                          "m",     "rounds", "drift",         "lambda", "cutoff"};
const std::set<std::string, std::less<>> kRocchioKeys = {"feedback_docs", "terms", "gamma"};
const std::set<std::string, std::less<>> kRmKeys = {"feedback_docs", "rm_lambda", "clip"};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = s.find(',', pos);
        out.emplace_back(trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::optional<double> as_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

std::size_t as_count(const std::string& system, const std::string& key, const std::string& value) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("system " + system + ": '" + key + "' expects a non-negative integer, got '" + value + "'");
    return v;
}

double as_real(const std::string& system, const std::string& key, const std::string& value) {
    auto v = as_number(value);
    if (!v) throw ConfigError("system " + system + ": '" + key + "' expects a number, got '" + value + "'");
    return *v;
}

// Numeric lists sort ascending, so grid order (and file naming) follows value order.
void normalize_values(std::vector<std::string>& values) {
    const bool numeric = std::all_of(values.begin(), values.end(), [](const std::string& v) { return as_number(v).has_value(); });
    if (numeric)
        std::stable_sort(values.begin(), values.end(),
                         [](const std::string& a, const std::string& b) { return *as_number(a) < *as_number(b); });
}

const std::set<std::string, std::less<>>& keys_for(SystemKind kind) {
    static const std::set<std::string, std::less<>> none;
    switch (kind) {
        case SystemKind::vdoc:
        case SystemKind::mcdoc:
        case SystemKind::mccluster: return kPipelineKeys;
        case SystemKind::rocchio: return kRocchioKeys;
        case SystemKind::rm: return kRmKeys;
        case SystemKind::lm: return none;
    }
    return none;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string_view to_string(SystemKind k) {
    switch (k) {
        case SystemKind::vdoc: return "vdoc";
        case SystemKind::mcdoc: return "mcdoc";
        case SystemKind::mccluster: return "mccluster";
        case SystemKind::lm: return "lm";
        case SystemKind::rocchio: return "rocchio";
        case SystemKind::rm: return "rm";
    }
    return "lm";
}

SystemKind parse_system_kind(std::string_view name) {
    for (auto k : {SystemKind::vdoc, SystemKind::mcdoc, SystemKind::mccluster, SystemKind::lm, SystemKind::rocchio,
                   SystemKind::rm})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown method '" + std::string(name) + "' (expected vdoc|mcdoc|mccluster|lm|rocchio|rm)");
}

ExperimentSpec parse_experiment(std::string_view text) {
    ExperimentSpec spec;
    std::set<std::string> seen_global;
    SystemSpec* current = nullptr;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        const std::size_t offset = pos;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(where + ": unterminated section header", offset);
            auto inner = trim(line.substr(1, line.size() - 2));
            if (inner.substr(0, 7) != "system " || trim(inner.substr(7)).empty())
                throw ParseError(where + ": expected [system NAME]", offset);
            const std::string name(trim(inner.substr(7)));
            for (const auto& s : spec.systems)
                if (s.name == name) throw ConfigError("system '" + name + "' is defined twice");
            spec.systems.push_back({name, {}});
            current = &spec.systems.back();
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(where + ": expected key = value", offset);
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError(where + ": empty key", offset);

        if (current) {
            if (current->grid.contains(key)) throw ParseError(where + ": duplicate key '" + key + "'", offset);
            auto values = split_list(value);
            if (std::any_of(values.begin(), values.end(), [](const std::string& v) { return v.empty(); }))
                throw ParseError(where + ": empty value for '" + key + "'", offset);
            normalize_values(values);
            current->grid[key] = std::move(values);
            continue;
        }

        if (!seen_global.insert(key).second) throw ParseError(where + ": duplicate key '" + key + "'", offset);
        if (key == "corpus") {
            spec.corpus = split_list(value);
        } else if (key == "format") {
            if (value != "trec" && value != "lines") throw ConfigError("format must be trec or lines");
            spec.format = value;
        } else if (key == "topics") {
            spec.topics = value;
        } else if (key == "qrels") {
            spec.qrels = value;
        } else if (key == "output") {
            spec.output = value;
        } else if (key == "stoplist") {
            spec.stoplist = value;
        } else if (key == "stemmer") {
            spec.stemmer = parse_stemmer(value);
        } else if (key == "mu") {
            auto v = as_number(value);
            if (!v || !(*v > 0)) throw ConfigError("mu must be a positive number");
            spec.mu = *v;
        } else if (key == "depth") {
            spec.depth = as_count("(global)", key, value);
        } else {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
    if (spec.corpus.empty()) throw ConfigError("experiment needs a corpus");
    if (spec.topics.empty()) throw ConfigError("experiment needs topics");
    for (const auto& s : spec.systems) expand_grid(spec, s);
    return spec;
}

std::string format_experiment(const ExperimentSpec& spec) {
    std::ostringstream out;
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
        return s;
    };
    out << "corpus = " << join(spec.corpus) << '\n';
    out << "format = " << spec.format << '\n';
    out << "topics = " << spec.topics << '\n';
    if (!spec.qrels.empty()) out << "qrels = " << spec.qrels << '\n';
    out << "output = " << spec.output << '\n';
    if (!spec.stoplist.empty()) out << "stoplist = " << spec.stoplist << '\n';
    out << "stemmer = " << to_string(spec.stemmer) << '\n';
    out << "mu = " << format_real(spec.mu) << '\n';
    out << "depth = " << spec.depth << '\n';
    for (const auto& s : spec.systems) {
        out << "\n[system " << s.name << "]\n";
        for (const auto& [key, values] : s.grid) out << key << " = " << join(values) << '\n';
    }
    return out.str();
}

std::string SystemPoint::stem() const {
    if (points <= 1) return system;
    const int width = std::max<int>(3, static_cast<int>(std::to_string(points).size()));
    char buf[32];
    std::snprintf(buf, sizeof buf, ".%0*zu", width, index);
    return system + buf;
}

std::string SystemPoint::label() const {
    std::string s;
    for (const auto& [k, v] : values) s += (s.empty() ? "" : " ") + k + "=" + v;
    return s;
}

std::string SystemPoint::tag() const { return system + "-" + fnv1a_hex(label()).substr(0, 8); }

std::vector<SystemPoint> expand_grid(const ExperimentSpec& spec, const SystemSpec& system) {
    auto method_it = system.grid.find("method");
    if (method_it == system.grid.end()) throw ConfigError("system " + system.name + ": missing 'method'");
    if (method_it->second.size() != 1) throw ConfigError("system " + system.name + ": 'method' takes one value");
    const SystemKind kind = parse_system_kind(method_it->second.front());
    const auto& allowed = keys_for(kind);
    for (const auto& [key, _] : system.grid)
        if (key != "method" && !allowed.contains(key))
            throw ConfigError("system " + system.name + ": key '" + key + "' does not apply to method " +
                              std::string(to_string(kind)));

    std::vector<std::pair<std::string, const std::vector<std::string>*>> axes;
    std::size_t total = 1;
    for (const auto& [key, values] : system.grid) {
        axes.push_back({key, &values});
        total *= values.size();
    }

    std::vector<SystemPoint> points;
    std::vector<std::size_t> digit(axes.size(), 0);
    for (std::size_t i = 0; i < total; ++i) {
        SystemPoint p;
        p.system = system.name;
        p.index = i + 1;
        p.points = total;
        p.kind = kind;
        p.run.mu = spec.mu;
        p.run.depth = spec.depth;
        for (std::size_t a = 0; a < axes.size(); ++a) p.values.push_back({axes[a].first, (*axes[a].second)[digit[a]]});

        for (const auto& [key, value] : p.values) {
            const auto& n = system.name;
            if (key == "method") {
                if (kind == SystemKind::vdoc) p.run.method = Method::vdoc;
                if (kind == SystemKind::mcdoc) p.run.method = Method::mcdoc;
                if (kind == SystemKind::mccluster) p.run.method = Method::mccluster;
            } else if (key == "alpha") p.run.alpha = as_count(n, key, value);
            else if (key == "alpha1") p.run.alpha1 = as_count(n, key, value);
            else if (key == "alpha_cluster") p.run.alpha_cluster = as_count(n, key, value);
            else if (key == "beta") p.run.beta = as_count(n, key, value);
            else if (key == "delta") p.run.delta = as_count(n, key, value);
            else if (key == "m") p.run.m = as_count(n, key, value);
            else if (key == "rounds") p.run.rounds = as_count(n, key, value);
            else if (key == "drift") p.run.drift.kind = parse_drift_kind(value);
            else if (key == "lambda") p.run.drift.lambda = as_real(n, key, value);
            else if (key == "cutoff") p.run.drift.cutoff = as_count(n, key, value);
            else if (key == "feedback_docs") p.rocchio.feedback_docs = p.rm.feedback_docs = as_count(n, key, value);
            else if (key == "terms") p.rocchio.terms = as_count(n, key, value);
            else if (key == "gamma") p.rocchio.gamma = as_real(n, key, value);
            else if (key == "rm_lambda") p.rm.lambda = as_real(n, key, value);
            else if (key == "clip") p.rm.clip = as_count(n, key, value);
        }

        try {
            switch (kind) {
                case SystemKind::vdoc:
                case SystemKind::mcdoc:
                case SystemKind::mccluster: p.run.validate(); break;
                case SystemKind::rocchio:
                    if (p.rocchio.feedback_docs < 1) throw ConfigError("feedback_docs must be >= 1");
                    if (!(p.rocchio.gamma >= 0)) throw ConfigError("gamma must be >= 0");
                    break;
                case SystemKind::rm:
                    if (p.rm.feedback_docs < 1) throw ConfigError("feedback_docs must be >= 1");
                    if (!(p.rm.lambda > 0 && p.rm.lambda < 1)) throw ConfigError("rm_lambda must lie in (0,1)");
                    break;
                case SystemKind::lm: break;
            }
            if (spec.depth < 1) throw ConfigError("depth must be >= 1");
        } catch (const ConfigError& e) {
            throw ConfigError("system " + system.name + " (" + p.label() + "): " + e.what());
        }
        points.push_back(std::move(p));

        for (std::size_t a = axes.size(); a-- > 0;) {
            if (++digit[a] < axes[a].second->size()) break;
            digit[a] = 0;
        }
    }
    return points;
}

std::vector<ScoredRanking> run_point(const SystemPoint& point, const std::vector<Query>& queries,
                                     const ExperimentContext& ctx, unsigned threads) {
    const ClusterIndex* clusters = nullptr;
    if (point.kind == SystemKind::mccluster) {
        auto it = ctx.clusters.find(point.run.delta);
        if (it == ctx.clusters.end())
            throw DataError("no cluster index with delta=" + std::to_string(point.run.delta));
        clusters = &it->second;
    }
    const auto& renderers = ctx.renderers.renderers();
    if (renderers.mu() != point.run.mu) throw ArtifactMismatch("renderers were built with a different mu");

    std::vector<ScoredRanking> out(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) {
        const auto& q = queries[i];
        switch (point.kind) {
            case SystemKind::lm: out[i] = lm_baseline(q, renderers, point.run.depth); break;
            case SystemKind::rocchio: out[i] = rocchio_rank(q, ctx.corpus, point.rocchio, point.run.depth); break;
            case SystemKind::rm: out[i] = relevance_model_rank(q, renderers, point.rm, point.run.depth); break;
            default: {
                const RetrievalContext rctx{ctx.corpus, ctx.renderers, clusters};
                out[i] = run_retrieval(q, point.run, rctx).ranking;
            }
        }
    });
    return out;
}

std::string format_run(const Corpus& corpus, const std::vector<Query>& queries,
                       const std::vector<ScoredRanking>& rankings, const std::string& tag) {
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < queries.size(); ++i) {
        std::size_t rank = 0;
        for (const auto& e : rankings.at(i).entries) {
            std::snprintf(buf, sizeof buf, " %zu %.6f ", ++rank, e.score);
            out += queries[i].id + " Q0 " + corpus.document(e.id).docno + buf + tag + '\n';
        }
    }
    return out;
}

std::string describe_run_defaults() {
    const RunConfig c;
    std::ostringstream out;
    out << "Run parameters (system keys) and defaults:\n"
        << "  method        = " << to_string(c.method) << "  (vdoc|mcdoc|mccluster; also lm|rocchio|rm)\n"
        << "  alpha         = " << c.alpha << "  (top document renderers per pseudo-query, rounds >= 2)\n"
        << "  alpha1        = " << c.alpha1 << "  (top renderers of the query in round 1)\n"
        << "  alpha_cluster = " << c.alpha_cluster << "  (top cluster renderers per pseudo-query)\n"
        << "  beta          = " << c.beta << "  (documents credited per cluster)\n"
        << "  delta         = " << c.delta << "  (cluster size)\n"
        << "  m             = 2*alpha  (re-scaling pool, must exceed alpha)\n"
        << "  rounds        = " << c.rounds << "  (T)\n"
        << "  mu            = " << c.mu << "  (Dirichlet smoothing; global key)\n"
        << "  drift         = " << to_string(c.drift.kind)
        << "  (none|interpolation|truncated_rerank|iterated_truncation|iterated_rerank|iterated_interpolation)\n"
        << "  lambda        = " << c.drift.lambda << "  (interpolation weight of the method scores)\n"
        << "  cutoff        = N  (truncation depth of the drift techniques)\n"
        << "  depth         = " << c.depth << "  (N, documents retrieved per query; global key)\n";
    const RocchioParams r;
    const RelevanceModelParams rm;
    out << "Baseline keys: feedback_docs = " << r.feedback_docs << ", terms = " << r.terms << ", gamma = " << r.gamma
        << " (rocchio); feedback_docs = " << rm.feedback_docs << ", rm_lambda = " << rm.lambda
        << ", clip = 0 (all terms) (rm)\n";
    return out.str();
}

}  // namespace pseudoq

#include "kge/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace kge {

namespace {

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool skippable(const std::string& line) { return line.empty() || line[0] == '#'; }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream iss(s);
    while (std::getline(iss, field, sep)) out.push_back(field);
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

[[noreturn]] void parse_error(const std::string& file, std::size_t lineno,
                              const std::string& what) {
    throw std::runtime_error(file + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

std::vector<Triple> load_triples(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file);
    std::vector<Triple> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        strip_cr(line);
        if (skippable(line)) continue;
        const auto fields = split(line, '\t');
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty())
            parse_error(file, lineno, "expected subject<TAB>relation<TAB>object");
        out.push_back({fields[0], fields[1], fields[2]});
    }
    return out;
}

void save_triples(const std::string& file, const std::vector<Triple>& triples) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file);
    for (const Triple& t : triples)
        out << t.subject << '\t' << t.relation << '\t' << t.object << '\n';
}

std::vector<RawPathQuery> load_paths(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file);
    std::vector<RawPathQuery> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        strip_cr(line);
        if (skippable(line)) continue;
        const auto fields = split(line, '\t');
        if (fields.size() != 3 && fields.size() != 4)
            parse_error(file, lineno, "expected subject<TAB>path<TAB>object[<TAB>label]");
        RawPathQuery q;
        q.subject = fields[0];
        q.object = fields[2];
        q.relations = split(fields[1], '/');
        if (q.subject.empty() || q.object.empty() || q.relations.empty())
            parse_error(file, lineno, "empty field");
        for (const std::string& r : q.relations)
            if (r.empty()) parse_error(file, lineno, "empty relation segment in path");
        if (fields.size() == 4) {
            if (fields[3] == "1")
                q.label = true;
            else if (fields[3] == "0")
                q.label = false;
            else
                parse_error(file, lineno, "label must be 0 or 1, got '" + fields[3] + "'");
        }
        out.push_back(std::move(q));
    }
    return out;
}

void save_paths(const std::string& file, const std::vector<RawPathQuery>& queries) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file);
    for (const RawPathQuery& q : queries) {
        out << q.subject << '\t';
        for (std::size_t i = 0; i < q.relations.size(); i++) {
            if (i) out << '/';
            out << q.relations[i];
        }
        out << '\t' << q.object;
        if (q.label) out << '\t' << (*q.label ? '1' : '0');
        out << '\n';
    }
}

std::vector<PathQuery> resolve_queries(const KnowledgeGraph& g,
                                       const std::vector<RawPathQuery>& raw) {
    std::vector<PathQuery> out;
    out.reserve(raw.size());
    for (const RawPathQuery& rq : raw) {
        PathQuery q;
        const auto s = g.entities.lookup(rq.subject);
        const auto o = g.entities.lookup(rq.object);
        if (!s) throw std::runtime_error("unknown entity: " + rq.subject);
        if (!o) throw std::runtime_error("unknown entity: " + rq.object);
        q.subject = *s;
        q.object = *o;
        for (const std::string& name : rq.relations) {
            const auto r = g.relations.lookup(name);
            if (!r) throw std::runtime_error("unknown relation: " + name);
            q.path.push_back(*r);
        }
        q.label = rq.label;
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<PathQuery> triples_as_queries(const KnowledgeGraph& g,
                                          const std::vector<Triple>& triples) {
    std::vector<PathQuery> out;
    out.reserve(triples.size());
    for (const Triple& t : triples) {
        const auto s = g.entities.lookup(t.subject);
        const auto r = g.relations.lookup(t.relation);
        const auto o = g.entities.lookup(t.object);
        if (!s || !r || !o)
            throw std::runtime_error("triple not covered by graph vocabulary: " + t.subject);
        out.push_back({*s, {*r}, *o, true});
    }
    return out;
}

namespace {

constexpr char kMagic[8] = {'K', 'G', 'E', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char buf[4];
    for (int i = 0; i < 4; i++) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; i++) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_f64_array(std::ostream& out, const std::vector<double>& a) {
    for (const double x : a) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, 8);
        write_u64(out, bits);
    }
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) throw std::runtime_error("checkpoint truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; i++) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) throw std::runtime_error("checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; i++) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

std::string read_string(std::istream& in) {
    const std::uint32_t len = read_u32(in);
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in) throw std::runtime_error("checkpoint truncated");
    return s;
}

void read_f64_array(std::istream& in, std::vector<double>& a) {
    for (double& x : a) {
        const std::uint64_t bits = read_u64(in);
        std::memcpy(&x, &bits, 8);
    }
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(kMagic, 8);
    write_u32(out, kVersion);
    write_string(out, model_kind_name(ckpt.params.kind));
    write_u32(out, static_cast<std::uint32_t>(ckpt.params.dims.n));
    write_u32(out, static_cast<std::uint32_t>(ckpt.params.dims.b));
    write_u32(out, static_cast<std::uint32_t>(ckpt.params.dims.m));
    write_u64(out, ckpt.params.num_entities);
    write_u64(out, ckpt.params.num_relations);
    for (const std::string& name : ckpt.entity_names) write_string(out, name);
    for (const std::string& name : ckpt.relation_names) write_string(out, name);
    write_f64_array(out, ckpt.params.ent);
    write_f64_array(out, ckpt.params.rel);
    if (!out) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path, std::optional<ModelKind> expected_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error(path + ": not a checkpoint file");
    const std::uint32_t version = read_u32(in);
    if (version != kVersion)
        throw std::runtime_error(path + ": unsupported checkpoint version " +
                                 std::to_string(version));
    Checkpoint ckpt;
    ckpt.params.kind = model_kind_from_name(read_string(in));
    if (expected_kind && ckpt.params.kind != *expected_kind)
        throw std::runtime_error(path + ": checkpoint holds a " +
                                 model_kind_name(ckpt.params.kind) + " model, expected " +
                                 model_kind_name(*expected_kind));
    ckpt.params.dims.n = static_cast<int>(read_u32(in));
    ckpt.params.dims.b = static_cast<int>(read_u32(in));
    ckpt.params.dims.m = static_cast<int>(read_u32(in));
    ckpt.params.num_entities = read_u64(in);
    ckpt.params.num_relations = read_u64(in);
    ckpt.entity_names.resize(ckpt.params.num_entities);
    for (std::string& name : ckpt.entity_names) name = read_string(in);
    ckpt.relation_names.resize(ckpt.params.num_relations);
    for (std::string& name : ckpt.relation_names) name = read_string(in);
    ckpt.params.ent.resize(ckpt.params.num_entities * ckpt.params.ent_stride());
    ckpt.params.rel.resize(ckpt.params.num_relations * ckpt.params.rel_stride());
    read_f64_array(in, ckpt.params.ent);
    read_f64_array(in, ckpt.params.rel);
    char extra;
    if (in.read(&extra, 1)) throw std::runtime_error(path + ": trailing bytes in checkpoint");
    return ckpt;
}

DatasetBundle gen_order_benchmark(int n_families, std::uint64_t rng_seed) {
    if (n_families < 1) throw std::invalid_argument("gen_order_benchmark: n_families >= 1");
    std::mt19937_64 rng(rng_seed);
    constexpr int kFaiths = 5;
    constexpr int kClubs = 10;
    std::uniform_int_distribution<int> pick_faith(0, kFaiths - 1);
    std::uniform_int_distribution<int> pick_club(0, kClubs - 1);

    DatasetBundle bundle;
    auto faith = [](int i) { return "faith_" + std::to_string(i); };
    auto club = [](int i) { return "club_" + std::to_string(i); };

    // (subject, object-of-positive) units: child ->parents-> parent
    // ->religion-> faith, and parent ->parents-> grandparent ->religion->
    // faith one generation up
    struct Unit {
        std::string subject, object;
    };
    std::vector<Unit> units;

    for (int f = 0; f < n_families; f++) {
        const std::string fam = std::to_string(f);
        const std::string child0 = "child_" + fam + "_0";
        const std::string child1 = "child_" + fam + "_1";
        const std::string parent = "parent_" + fam;
        const std::string grand = "grand_" + fam;
        const std::string city = "city_" + fam;
        const std::string parent_faith = faith(pick_faith(rng));
        const std::string grand_faith = faith(pick_faith(rng));

        bundle.base_train.push_back({child0, "parents", parent});
        bundle.base_train.push_back({child1, "parents", parent});
        bundle.base_train.push_back({parent, "parents", grand});
        bundle.base_train.push_back({parent, "religion", parent_faith});
        bundle.base_train.push_back({grand, "religion", grand_faith});
        bundle.base_train.push_back({child0, "livesIn", city});
        bundle.base_train.push_back({child1, "livesIn", city});
        bundle.base_train.push_back({parent, "livesIn", city});
        bundle.base_train.push_back({child0, "memberOf", club(pick_club(rng))});
        bundle.base_train.push_back({child1, "memberOf", club(pick_club(rng))});

        units.push_back({child0, parent_faith});
        units.push_back({child1, parent_faith});
        units.push_back({parent, grand_faith});
    }

    // children and parents never carry a religion edge of their own, so
    // the reversed order religion/parents has no witness from them
    std::shuffle(units.begin(), units.end(), rng);
    const std::size_t n_train = units.size() * 8 / 10;
    const std::size_t n_valid = units.size() / 10;
    for (std::size_t i = 0; i < units.size(); i++) {
        const Unit& u = units[i];
        RawPathQuery pos{u.subject, {"parents", "religion"}, u.object, true};
        RawPathQuery neg{u.subject, {"religion", "parents"}, u.object, false};
        auto& split = i < n_train               ? bundle.path_train
                      : i < n_train + n_valid   ? bundle.path_valid
                                                : bundle.path_test_deduction;
        // positives twice per unit: keeps the positive pull dominant for
        // models whose scores cannot separate the two orders
        split.push_back(pos);
        split.push_back(pos);
        split.push_back(neg);
    }
    return bundle;
}

}  // namespace kge

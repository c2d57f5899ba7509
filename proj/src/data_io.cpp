#include "nsrbm/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <tuple>
#include <unordered_map>

namespace nsrbm::data_io {

namespace {

constexpr std::string_view kBases = "acgt";

int base_index(char b) {
    switch (b) {
        case 'a': return 0;
        case 'c': return 1;
        case 'g': return 2;
        case 't': return 3;
        default: return -1;
    }
}

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open file: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::vector<PromoterRecord> parse_promoters(const std::string& text) {
    std::vector<PromoterRecord> records;
    int line_no = 0;
    for (const std::string& raw : split_lines(text)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;

        auto c1 = line.find(',');
        auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw DataError("line " + std::to_string(line_no) + ": expected '+/-,name,sequence'");

        PromoterRecord r;
        std::string label = trim(line.substr(0, c1));
        if (label == "+")
            r.label = true;
        else if (label == "-")
            r.label = false;
        else
            throw DataError("line " + std::to_string(line_no) + ": label must be '+' or '-'");
        r.name = trim(line.substr(c1 + 1, c2 - c1 - 1));

        for (char c : line.substr(c2 + 1)) {
            if (std::isspace(static_cast<unsigned char>(c))) continue;
            char b = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (base_index(b) < 0)
                throw DataError("line " + std::to_string(line_no) + " (" + r.name +
                                "): invalid base '" + std::string(1, c) + "'");
            r.sequence.push_back(b);
        }
        if (r.sequence.size() != kPromoterSequenceLength)
            throw DataError("line " + std::to_string(line_no) + " (" + r.name + "): sequence length " +
                            std::to_string(r.sequence.size()) + ", expected 57");
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<PromoterRecord> load_promoters(const std::string& path) {
    return parse_promoters(read_file(path));
}

int promoter_bit(int position, char base) {
    int b = base_index(base);
    if (position < 0 || position >= kPromoterSequenceLength || b < 0)
        throw DataError("invalid promoter position/base");
    return position * 4 + b;
}

std::string promoter_symbol(int position, char base) {
    return "p" + std::to_string(position) + "=" + std::string(1, base);
}

rbm::Bits one_hot_promoter(const PromoterRecord& r) {
    rbm::Bits bits(kPromoterBits, 0);
    for (int i = 0; i < kPromoterSequenceLength; ++i)
        bits[static_cast<std::size_t>(promoter_bit(i, r.sequence[static_cast<std::size_t>(i)]))] = 1;
    bits[kPromoterLabelBit] = r.label ? 1 : 0;
    return bits;
}

std::string decode_promoter_bits(const rbm::Bits& bits) {
    std::string seq;
    for (int i = 0; i < kPromoterSequenceLength; ++i)
        for (int b = 0; b < 4; ++b)
            if (bits.at(static_cast<std::size_t>(i * 4 + b))) seq.push_back(kBases[static_cast<std::size_t>(b)]);
    return seq;
}

KinshipData parse_kinship(const std::string& text) {
    KinshipData data;
    std::unordered_map<std::string, int> person_ids;
    std::unordered_map<std::string, int> relation_ids;
    std::set<std::tuple<int, int, int>> seen;

    auto person = [&](const std::string& name) {
        auto [it, inserted] = person_ids.emplace(name, static_cast<int>(data.people.size()));
        if (inserted) data.people.push_back({it->second, name});
        return it->second;
    };
    auto relation = [&](const std::string& name) {
        auto [it, inserted] = relation_ids.emplace(name, static_cast<int>(data.relations.size()));
        if (inserted) data.relations.push_back({it->second, name, 2});
        return it->second;
    };

    int line_no = 0;
    for (const std::string& raw : split_lines(text)) {
        ++line_no;
        std::string line = trim(raw);
        if (auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;

        auto open = line.find('(');
        auto comma = line.find(',', open == std::string::npos ? 0 : open);
        auto close = line.rfind(')');
        if (open == std::string::npos || comma == std::string::npos || close == std::string::npos ||
            !(open < comma && comma < close))
            throw DataError("line " + std::to_string(line_no) + ": expected 'relation(A,B)'");

        std::string rel = trim(line.substr(0, open));
        std::string a = trim(line.substr(open + 1, comma - open - 1));
        std::string b = trim(line.substr(comma + 1, close - comma - 1));
        if (rel.empty() || a.empty() || b.empty())
            throw DataError("line " + std::to_string(line_no) + ": empty name");

        fol::GroundAtom atom{relation(rel), {person(a), person(b)}};
        if (!seen.insert({atom.predicate, atom.args[0], atom.args[1]}).second)
            throw DataError("line " + std::to_string(line_no) + ": duplicate triple " + line);
        data.atoms.push_back(std::move(atom));
    }
    return data;
}

KinshipData load_kinship(const std::string& path) { return parse_kinship(read_file(path)); }

std::string results_to_csv(const std::vector<ResultRow>& rows) {
    std::string out = "experiment,train_size,repeat,seed,mode,accuracy\n";
    char buf[64];
    for (const ResultRow& row : rows) {
        out += row.experiment;
        out += ',' + std::to_string(row.train_size);
        out += ',' + std::to_string(row.repeat);
        out += ',' + std::to_string(row.seed);
        out += ',' + row.mode;
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, row.accuracy);
        out += ',';
        out.append(buf, ptr);
        out += '\n';
    }
    return out;
}

void emit_results(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write results file: " + path);
    os << results_to_csv(rows);
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    int line_no = 0;
    for (const std::string& raw : split_lines(text)) {
        ++line_no;
        std::string line = trim(raw);
        if (auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        cfg.values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) { return parse(read_file(path)); }

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : std::stod(it->second);
}

int ExperimentConfig::get_int(const std::string& key, int fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : std::stoi(it->second);
}

}  // namespace nsrbm::data_io

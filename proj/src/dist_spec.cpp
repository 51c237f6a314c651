#include "phlb/dist_spec.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace phlb {

namespace {

std::vector<double> parse_numbers(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("dist spec: bad number in ") + what + ": '" +
                                        item + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string("dist spec: empty ") + what);
    return out;
}

RowVec to_rowvec(const std::vector<double>& v) {
    RowVec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r(i) = v[i];
    return r;
}

}  // namespace

nlohmann::json to_json(const PhaseType& ph) {
    nlohmann::json doc;
    doc["alpha"] = std::vector<double>(ph.alpha().begin(), ph.alpha().end());
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < ph.order(); ++i) {
        std::vector<double> row(ph.order());
        for (int j = 0; j < ph.order(); ++j) row[j] = ph.T()(i, j);
        rows.push_back(std::move(row));
    }
    doc["T"] = rows;
    return doc;
}

PhaseType ph_from_json(const nlohmann::json& doc) {
    if (!doc.contains("alpha") || !doc.contains("T"))
        throw std::invalid_argument("dist spec: JSON needs 'alpha' and 'T'");
    const auto alpha = doc.at("alpha").get<std::vector<double>>();
    const auto rows = doc.at("T").get<std::vector<std::vector<double>>>();
    const size_t m = alpha.size();
    if (rows.size() != m) throw std::invalid_argument("dist spec: T row count != alpha size");
    Mat T(m, m);
    for (size_t i = 0; i < m; ++i) {
        if (rows[i].size() != m)
            throw std::invalid_argument("dist spec: T must be square");
        for (size_t j = 0; j < m; ++j) T(i, j) = rows[i][j];
    }
    return {to_rowvec(alpha), T};
}

PhaseType parse_dist(const std::string& spec) {
    if (spec.empty()) throw std::invalid_argument("dist spec: empty");

    if (spec.front() == '{') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(spec);
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("dist spec: bad inline JSON: ") + e.what());
        }
        return ph_from_json(doc);
    }

    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const std::string kind = spec.substr(0, colon);
        const std::string rest = spec.substr(colon + 1);
        if (kind == "erlang") {
            const auto v = parse_numbers(rest, "erlang");
            if (v.size() != 2) throw std::invalid_argument("dist spec: erlang:<phases>,<rate>");
            if (v[0] != static_cast<int>(v[0]))
                throw std::invalid_argument("dist spec: erlang phase count must be an integer");
            return erlang(static_cast<int>(v[0]), v[1]);
        }
        if (kind == "exp") {
            const auto v = parse_numbers(rest, "exp");
            if (v.size() != 1) throw std::invalid_argument("dist spec: exp:<rate>");
            return exponential(v[0]);
        }
        if (kind == "hyperexp") {
            const auto semi = rest.find(';');
            if (semi == std::string::npos)
                throw std::invalid_argument("dist spec: hyperexp:<weights>;<rates>");
            const auto w = parse_numbers(rest.substr(0, semi), "hyperexp weights");
            const auto r = parse_numbers(rest.substr(semi + 1), "hyperexp rates");
            if (w.size() != r.size())
                throw std::invalid_argument("dist spec: hyperexp weight/rate counts disagree");
            return hyper_exponential(to_rowvec(w), to_rowvec(r));
        }
        if (kind == "coxian2") {
            const auto v = parse_numbers(rest, "coxian2");
            if (v.size() != 3) throw std::invalid_argument("dist spec: coxian2:<eta>,<xi1>,<xi2>");
            return coxian2(v[0], v[1], v[2]);
        }
        // fall through: could be a path containing ':'
    }

    std::ifstream in(spec);
    if (!in) throw std::invalid_argument("dist spec: unknown shorthand or unreadable file '" + spec + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("dist spec: bad JSON in '" + spec + "': " + e.what());
    }
    return ph_from_json(doc);
}

}  // namespace phlb

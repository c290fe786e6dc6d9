#include "tabml/dataset.hpp"
#include "tabml/error.hpp"
#include "text.hpp"

#include <algorithm>
#include <fstream>

namespace tabml {

namespace {

// Reads a possibly quoted token from the front of `s` and advances past it.
std::string take_token(std::string_view& s) {
    s = detail::trim(s);
    if (s.empty()) return {};
    if (s.front() == '\'' || s.front() == '"') {
        const char quote = s.front();
        const auto end = s.find(quote, 1);
        if (end == std::string_view::npos) throw Error(ErrorKind::MalformedHeader, "unterminated quote in '" + std::string(s) + "'");
        std::string token(s.substr(1, end - 1));
        s.remove_prefix(end + 1);
        return token;
    }
    const auto end = s.find_first_of(" \t{");
    std::string token(s.substr(0, end));
    s.remove_prefix(end == std::string_view::npos ? s.size() : end);
    return token;
}

AttributeSpec parse_attribute(std::string_view rest, std::size_t line_no) {
    const std::string name = take_token(rest);
    if (name.empty()) throw Error(ErrorKind::MalformedHeader, "line " + std::to_string(line_no) + ": attribute without a name");
    rest = detail::trim(rest);
    if (!rest.empty() && rest.front() == '{') {
        const auto close = rest.rfind('}');
        if (close == std::string_view::npos) {
            throw Error(ErrorKind::MalformedHeader, "line " + std::to_string(line_no) + ": unterminated level list");
        }
        auto levels = detail::split_fields(rest.substr(1, close - 1));
        if (levels.empty() || std::any_of(levels.begin(), levels.end(), [](const auto& l) { return l.empty(); })) {
            throw Error(ErrorKind::MalformedHeader, "line " + std::to_string(line_no) + ": empty level in '" + name + "'");
        }
        std::vector<std::string> sorted = levels;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw Error(ErrorKind::MalformedHeader, "line " + std::to_string(line_no) + ": duplicate level in '" + name + "'");
        }
        return AttributeSpec::nominal(name, std::move(levels));
    }
    const auto type = detail::lower(take_token(rest));
    if (type == "numeric" || type == "real" || type == "integer") return AttributeSpec::numeric(name);
    if (type == "string" || type == "date" || type == "relational") {
        throw Error(ErrorKind::UnsupportedArffFeature, "attribute '" + name + "' has unsupported type " + type);
    }
    throw Error(ErrorKind::MalformedHeader, "line " + std::to_string(line_no) + ": unknown type '" + type + "'");
}

}  // namespace

Dataset load_arff(std::istream& source, const ArffOptions& options) {
    std::string relation = "dataset";
    std::vector<AttributeSpec> attrs;
    std::vector<std::vector<double>> rows;
    bool in_data = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        auto view = detail::trim(line);
        if (view.empty() || view.front() == '%') continue;
        if (!in_data) {
            if (view.front() != '@') throw Error(ErrorKind::MalformedHeader, "line " + std::to_string(line_no) + ": expected a declaration");
            const auto space = view.find_first_of(" \t");
            const auto keyword = detail::lower(view.substr(0, space));
            auto rest = space == std::string_view::npos ? std::string_view{} : view.substr(space);
            if (keyword == "@relation") {
                relation = take_token(rest);
            } else if (keyword == "@attribute") {
                attrs.push_back(parse_attribute(rest, line_no));
            } else if (keyword == "@data") {
                in_data = true;
            } else {
                throw Error(ErrorKind::MalformedHeader, "line " + std::to_string(line_no) + ": unknown declaration " + keyword);
            }
            continue;
        }
        if (view.front() == '{') throw Error(ErrorKind::UnsupportedArffFeature, "line " + std::to_string(line_no) + ": sparse rows");
        const auto fields = detail::split_fields(view);
        if (fields.size() != attrs.size()) {
            throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                                                     " values, expected " + std::to_string(attrs.size()));
        }
        std::vector<double> row(attrs.size());
        for (std::size_t j = 0; j < attrs.size(); ++j) {
            if (fields[j].empty() || fields[j] == "?") {
                throw Error(ErrorKind::MissingValue, "row " + std::to_string(rows.size() + 1) + " (line " + std::to_string(line_no) +
                                                         "), column '" + attrs[j].name + "'");
            }
            if (attrs[j].is_nominal()) {
                const auto idx = attrs[j].level_index(fields[j]);
                if (!idx) {
                    throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + ": '" + fields[j] +
                                                             "' is not a level of '" + attrs[j].name + "'");
                }
                row[j] = static_cast<double>(*idx);
            } else {
                const auto v = detail::parse_number(fields[j]);
                if (!v) throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + ": '" + fields[j] + "' is not numeric");
                row[j] = *v;
            }
        }
        rows.push_back(std::move(row));
    }
    if (!in_data) throw Error(ErrorKind::MalformedHeader, "missing @data section");
    if (attrs.empty()) throw Error(ErrorKind::MalformedHeader, "no @attribute declarations");
    if (rows.empty()) throw Error(ErrorKind::EmptyDataset, "no data rows");

    std::size_t class_index = attrs.size() - 1;
    if (options.class_attribute) {
        const auto it = std::find_if(attrs.begin(), attrs.end(), [&](const auto& a) { return a.name == *options.class_attribute; });
        if (it == attrs.end()) throw Error(ErrorKind::UnknownClassColumn, "no attribute named '" + *options.class_attribute + "'");
        class_index = static_cast<std::size_t>(it - attrs.begin());
    }
    if (!attrs[class_index].is_nominal()) {
        throw Error(ErrorKind::UnknownClassColumn, "class attribute '" + attrs[class_index].name + "' is not nominal");
    }

    Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(attrs.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        values.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const RowVector>(rows[i].data(), static_cast<Eigen::Index>(rows[i].size()));
    }
    return Dataset(relation, std::move(attrs), class_index, std::move(values));
}

Dataset load_arff_file(const std::string& path, const ArffOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
    return load_arff(in, options);
}

}  // namespace tabml

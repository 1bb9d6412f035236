// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 Claimcheck Contributors

#include "claimcheck/jsonl.hpp"

#include "claimcheck/error.hpp"
#include "claimcheck/text.hpp"

#include <fstream>
#include <sstream>

namespace claimcheck::jsonl {

void for_each(const std::filesystem::path& path,
              const std::function<void(std::size_t, const json&)>& fn,
              const std::function<void(std::size_t, const std::string&)>& on_bad_line) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open file: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (text::trim(line).empty())
            continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded()) {
            if (on_bad_line)
                on_bad_line(line_no, "invalid JSON");
            else
                throw Error(path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
            continue;
        }
        fn(line_no, obj);
    }
}

std::vector<json> read_all(const std::filesystem::path& path) {
    std::vector<json> rows;
    for_each(path, [&](std::size_t, const json& obj) { rows.push_back(obj); });
    return rows;
}

void write_all(const std::filesystem::path& path, const std::vector<json>& rows) {
    std::ostringstream out;
    for (const auto& row : rows)
        out << row.dump() << '\n';
    write_text_file(path, out.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write file: " + tmp.string());
        out << content;
        if (!out)
            throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open file: " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace claimcheck::jsonl

#include "courtsim/case_model.hpp"

#include <nlohmann/json.hpp>

#include "util.hpp"

namespace courtsim {

namespace {

using nlohmann::json;

const char* kRequiredFields[] = {
    "case_id",         "summary",          "charges",  "law_explanation",
    "prosecution_evidence", "defense_evidence", "keywords",
};

std::string require_string(const json& doc, const std::string& name) {
    if (!doc.contains(name)) {
        throw CaseFileError(CaseFileError::Kind::MissingField, name,
                            "missing field: " + name);
    }
    const auto& v = doc.at(name);
    if (!v.is_string()) {
        throw CaseFileError(CaseFileError::Kind::Malformed, name,
                            "field is not a string: " + name);
    }
    return v.get<std::string>();
}

std::vector<std::string> require_string_list(const json& doc, const std::string& name) {
    if (!doc.contains(name)) {
        throw CaseFileError(CaseFileError::Kind::MissingField, name,
                            "missing field: " + name);
    }
    const auto& v = doc.at(name);
    if (!v.is_array()) {
        throw CaseFileError(CaseFileError::Kind::Malformed, name,
                            "field is not a list: " + name);
    }
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& item : v) {
        if (!item.is_string()) {
            throw CaseFileError(CaseFileError::Kind::Malformed, name,
                                "list element is not a string in: " + name);
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

}  // namespace

CaseFile parse_case_json(const std::string& json_text, std::vector<std::string>* warnings) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw CaseFileError(CaseFileError::Kind::Malformed, "",
                            std::string("malformed case file: ") + e.what());
    }
    if (!doc.is_object()) {
        throw CaseFileError(CaseFileError::Kind::Malformed, "",
                            "malformed case file: top level is not an object");
    }

    CaseFile c;
    c.case_id = require_string(doc, "case_id");
    c.summary = require_string(doc, "summary");
    c.charges = require_string_list(doc, "charges");
    c.law_explanation = require_string(doc, "law_explanation");
    c.prosecution_evidence = require_string_list(doc, "prosecution_evidence");
    c.defense_evidence = require_string_list(doc, "defense_evidence");

    for (const auto& raw : require_string_list(doc, "keywords")) {
        std::string trimmed = util::trim(raw);
        if (trimmed.empty()) {
            throw CaseFileError(CaseFileError::Kind::EmptyField, "keywords",
                                "blank keyword entry");
        }
        c.keywords.push_back(trimmed);
        c.keywords_normalized.push_back(util::to_lower(trimmed));
    }

    if (warnings != nullptr) {
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            bool known = false;
            for (const char* f : kRequiredFields) {
                if (it.key() == f) { known = true; break; }
            }
            if (!known) warnings->push_back("ignored unknown field: " + it.key());
        }
    }

    // Enforce the hard invariants before handing the case out.
    if (c.case_id.empty()) {
        throw CaseFileError(CaseFileError::Kind::EmptyField, "case_id", "empty case_id");
    }
    if (c.case_id.find('/') != std::string::npos ||
        c.case_id.find('\\') != std::string::npos) {
        throw CaseFileError(CaseFileError::Kind::Malformed, "case_id",
                            "case_id contains a path separator");
    }
    if (util::trim(c.summary).empty()) {
        throw CaseFileError(CaseFileError::Kind::EmptyField, "summary", "empty summary");
    }
    if (util::trim(c.law_explanation).empty()) {
        throw CaseFileError(CaseFileError::Kind::EmptyField, "law_explanation",
                            "empty law_explanation");
    }
    if (c.charges.empty()) {
        throw CaseFileError(CaseFileError::Kind::EmptyField, "charges", "empty charges list");
    }
    if (c.keywords.empty()) {
        throw CaseFileError(CaseFileError::Kind::EmptyField, "keywords", "empty keywords list");
    }
    return c;
}

CaseFile load_case(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::string text;
    try {
        text = util::read_text_file(path);
    } catch (const std::exception& e) {
        throw CaseFileError(CaseFileError::Kind::Malformed, "", e.what());
    }
    return parse_case_json(text, warnings);
}

std::string serialize_case(const CaseFile& c) {
    json doc;
    doc["case_id"] = c.case_id;
    doc["summary"] = c.summary;
    doc["charges"] = c.charges;
    doc["law_explanation"] = c.law_explanation;
    doc["prosecution_evidence"] = c.prosecution_evidence;
    doc["defense_evidence"] = c.defense_evidence;
    doc["keywords"] = c.keywords;
    return doc.dump(2) + "\n";
}

std::vector<CaseViolation> validate_case(const CaseFile& c) {
    std::vector<CaseViolation> violations;
    if (c.case_id.empty()) {
        violations.push_back({"case_id", "case_id is empty"});
    } else if (c.case_id.find('/') != std::string::npos ||
               c.case_id.find('\\') != std::string::npos) {
        violations.push_back({"case_id", "case_id contains a path separator"});
    }
    if (util::trim(c.summary).empty()) {
        violations.push_back({"summary", "summary is empty"});
    }
    if (c.charges.empty()) {
        violations.push_back({"charges", "charges list is empty"});
    }
    if (util::trim(c.law_explanation).empty()) {
        violations.push_back({"law_explanation", "law_explanation is empty"});
    }
    if (c.keywords.empty()) {
        violations.push_back({"keywords", "keywords list is empty"});
    }
    for (const auto& k : c.keywords) {
        if (util::trim(k).empty()) {
            violations.push_back({"keywords", "blank keyword"});
        }
    }
    if (c.keywords_normalized.size() != c.keywords.size()) {
        violations.push_back({"keywords", "normalized keyword list out of sync"});
    }
    return violations;
}

}  // namespace courtsim

#include "courtsim/prompt_templates.hpp"

#include <stdexcept>

#include "util.hpp"

namespace courtsim {

namespace {

const char* kJudgeTemplate = R"(You are the presiding Judge in a criminal trial simulation.

Case summary:
{{summary}}

Charges:
{{charges}}

Explanation of the relevant law:
{{law_explanation}}

Retrieved legal context:
{{context}}

Write impartial instructions for the adjudicators who will deliberate on this
case. Lay out the standard of proof, the elements of each charge, and how the
evidence should be weighed. Where you rely on the retrieved context, cite it
inline using the exact form [Source: <name>, chunk <id>] copied from the
context block above. If the context block reads NO CONTEXT RETRIEVED, rely on
the case material alone and do not fabricate citations.
)";

const char* kProsecutionTemplate = R"(You are the Prosecution Counsel in a criminal trial simulation.

Case summary:
{{summary}}

Charges:
{{charges}}

Explanation of the relevant law:
{{law_explanation}}

Evidence for the prosecution:
{{evidence}}

Retrieved legal context:
{{context}}

Construct a persuasive argument that the charges are proven beyond reasonable
doubt, grounded in the evidence above. Where you rely on the retrieved
context, cite it inline using the exact form [Source: <name>, chunk <id>]
copied from the context block. If the context block reads NO CONTEXT
RETRIEVED, argue from the case material alone and do not fabricate citations.
)";

const char* kDefenseTemplate = R"(You are the Defense Counsel in a criminal trial simulation.

Case summary:
{{summary}}

Charges:
{{charges}}

Explanation of the relevant law:
{{law_explanation}}

Evidence for the defense:
{{evidence}}

Retrieved legal context:
{{context}}

Construct a persuasive argument that reasonable doubt remains, grounded in the
evidence above. Where you rely on the retrieved context, cite it inline using
the exact form [Source: <name>, chunk <id>] copied from the context block. If
the context block reads NO CONTEXT RETRIEVED, argue from the case material
alone and do not fabricate citations.
)";

const char* kAdjudicatorTemplate = R"(You are Adjudicator {{agent_id}} on a panel of {{num_adjudicators}} deciding a
criminal case. This is deliberation round {{round}}.

Case summary:
{{summary}}

Charges:
{{charges}}

Judge's instructions:
{{instructions}}

Prosecution argument:
{{prosecution_argument}}

Defense argument:
{{defense_argument}}

Statements from previous rounds:
{{peer_statements}}

Weigh the instructions, the arguments, and your peers' statements, then state
your current position. Respond in exactly this format:
LEANING: <Guilty | Not Guilty | Undecided>
JUSTIFICATION: <your detailed reasoning, referring to specific facts and evidence>
)";

std::string read_required(const std::filesystem::path& dir, const char* name) {
    auto path = dir / name;
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("template set is missing " + path.string());
    }
    return util::read_text_file(path);
}

}  // namespace

PromptTemplateSet PromptTemplateSet::builtin() {
    PromptTemplateSet set;
    set.judge_ = kJudgeTemplate;
    set.prosecution_ = kProsecutionTemplate;
    set.defense_ = kDefenseTemplate;
    set.adjudicator_ = kAdjudicatorTemplate;
    return set;
}

PromptTemplateSet PromptTemplateSet::load_dir(const std::filesystem::path& dir) {
    PromptTemplateSet set;
    set.judge_ = read_required(dir, "judge.txt");
    set.prosecution_ = read_required(dir, "prosecution.txt");
    set.defense_ = read_required(dir, "defense.txt");
    set.adjudicator_ = read_required(dir, "adjudicator.txt");
    return set;
}

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t open = tmpl.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        std::size_t close = tmpl.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        std::string name = tmpl.substr(open + 2, close - open - 2);
        auto it = values.find(name);
        if (it != values.end()) {
            out += it->second;
        } else {
            out.append(tmpl, open, close + 2 - open);
        }
        pos = close + 2;
    }
    return out;
}

}  // namespace courtsim

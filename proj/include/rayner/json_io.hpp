#pragma once

// JSON renderings of library values. Keys keep insertion order so that output
// is byte-stable across runs.

#include <json.hpp>

#include "rayner/series.hpp"
#include "rayner/supports.hpp"

namespace rayner {

using json = nlohmann::ordered_json;

inline json to_json(const GroupElement& g) { return g.to_string(); }

inline json to_json(const TermList& list)
{
    json terms = json::array();
    for (const auto& t : list.terms()) {
        terms.push_back(json{{"exp", t.exponent.to_string()}, {"coef", t.coefficient.to_string()}});
    }
    return json{{"terms", std::move(terms)},
                {"complete", list.complete()},
                {"valid_through", list.valid_through().to_string()}};
}

inline json to_json(const SupportSet& s)
{
    json elems = json::array();
    for (const auto& e : s.elements()) {
        elems.push_back(e.to_string());
    }
    json out{{"elements", std::move(elems)}, {"finite", s.is_finite()}};
    if (s.known_through()) {
        out["exact_through"] = s.known_through()->to_string();
    }
    return out;
}

inline json to_json(const Witness& w)
{
    json out = json::object();
    json premises = json::array();
    for (const auto& p : w.premises) {
        premises.push_back(p.to_string());
    }
    out["premises"] = std::move(premises);
    if (w.offending) {
        out["offending"] = w.offending->to_string();
    }
    if (w.element) {
        out["element"] = w.element->to_string();
    }
    out["description"] = w.description;
    return out;
}

inline json to_json(const Verdict& v)
{
    json out{{"outcome", to_string(v.outcome)}, {"rule", v.rule}};
    if (v.witness) {
        out["witness"] = to_json(*v.witness);
    }
    return out;
}

} // namespace rayner

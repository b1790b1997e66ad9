#include "anonkit/qi_presets.hpp"

#include "anonkit/error.hpp"

namespace anonkit::qi_presets {

std::vector<std::string> adult12() {
  return {"age",          "workclass",   "education-num", "marital-status",
          "occupation",   "relationship", "race",         "sex",
          "capital-gain", "capital-loss", "hours-per-week", "native-country"};
}

std::vector<std::string> adult10() {
  return {"age",        "workclass",    "education-num", "marital-status", "occupation",
          "relationship", "race",       "sex",           "hours-per-week", "native-country"};
}

std::vector<std::string> adult8() {
  return {"workclass", "marital-status", "occupation",     "relationship",
          "race",      "sex",            "native-country", "education-num"};
}

std::vector<std::string> loan18() {
  return {"emp_length",   "home_ownership", "annual_income", "zip_code",
          "purpose",      "dti",            "delinq_2yrs",   "inq_last_6mths",
          "mths_since_last_delinq", "open_acc", "total_acc", "mths_since_last_record",
          "pub_rec",      "revol_bal",      "revol_util",    "hardship_flag",
          "last_pymnt_amnt", "installment"};
}

std::vector<std::string> by_name(const std::string& name) {
  if (name == "adult12") return adult12();
  if (name == "adult10") return adult10();
  if (name == "adult8") return adult8();
  if (name == "loan18") return loan18();
  throw ValidationError("unknown QI preset '" + name + "'");
}

std::vector<std::string> names() { return {"adult12", "adult10", "adult8", "loan18"}; }

}  // namespace anonkit::qi_presets

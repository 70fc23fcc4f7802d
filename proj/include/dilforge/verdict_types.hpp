#pragma once

#include <cstdint>
#include <string>

namespace dilforge {

enum class LoadClass : uint8_t { Constant, Striding, Irregular, Unclassifiable };

enum class RejectReason : uint8_t {
  None,
  ChasingCycle,
  ControlDependent,
  StoreAliasUnresolved,
  OffsetDuplicate,
  ColdLoop,
};

const char* load_class_name(LoadClass c);
const char* reject_reason_name(RejectReason r);

}  // namespace dilforge

// SPDX-License-Identifier: Apache-2.0
#include "ir/pass.hpp"
namespace wsc::passes { void register_bufferize_passes() {} }

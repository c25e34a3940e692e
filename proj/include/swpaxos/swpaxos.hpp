/* Copyright 2026 The swpaxos Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "swpaxos/acceptor.hpp"
#include "swpaxos/checkers.hpp"
#include "swpaxos/coordinator.hpp"
#include "swpaxos/harness.hpp"
#include "swpaxos/hosts.hpp"
#include "swpaxos/netsim.hpp"
#include "swpaxos/nodes.hpp"
#include "swpaxos/pipeline.hpp"
#include "swpaxos/result.hpp"
#include "swpaxos/scenario.hpp"
#include "swpaxos/trace.hpp"
#include "swpaxos/wire.hpp"

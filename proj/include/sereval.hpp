/* Copyright 2026 The sereval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include "sereval/aliases.hpp"
#include "sereval/bench.hpp"
#include "sereval/corpusmeta.hpp"
#include "sereval/ensemble.hpp"
#include "sereval/error.hpp"
#include "sereval/labels.hpp"
#include "sereval/metricore.hpp"
#include "sereval/modelio.hpp"
#include "sereval/outparse.hpp"
#include "sereval/promptkit.hpp"
#include "sereval/splitter.hpp"

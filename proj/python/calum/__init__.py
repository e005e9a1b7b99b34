# Copyright 2026 The Calum Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python bindings for the calum consistency harness."""

from calum._calum import (
    CalumError,
    consistency,
    evaluate_stub,
    format_percent,
    parse_generated_label,
    render,
    render_seq2seq,
    stub_label,
    task_ids,
    task_labels,
    welch_t_test,
)

__all__ = [
    "CalumError",
    "consistency",
    "evaluate_stub",
    "format_percent",
    "parse_generated_label",
    "render",
    "render_seq2seq",
    "stub_label",
    "task_ids",
    "task_labels",
    "welch_t_test",
]

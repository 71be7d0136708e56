// Copyright Contributors to the HybridRender Project
// SPDX-License-Identifier: Apache-2.0

// Placeholder CLI entry point; subcommands are wired up with the trainer.
int main() { return 0; }

# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Convex integrands on spheres, their Wulff shapes and duals.
"""

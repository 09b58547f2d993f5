"""
Platoon route planner package.
"""

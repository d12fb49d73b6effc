"""
Route blueprints for the completion service
"""

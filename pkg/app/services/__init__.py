"""
Service layer shared by the command line and the HTTP API
"""
from .completion_service import CompletionService
from .suite_service import SuiteService

__all__ = ['CompletionService', 'SuiteService']

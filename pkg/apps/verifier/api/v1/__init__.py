"""
API v1 package for the verifier application.
Contains serializers, views, and URL patterns for API version 1.
"""

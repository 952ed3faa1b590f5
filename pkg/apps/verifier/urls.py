"""
Main URL configuration for the verifier application.
"""

from django.urls import path, include

from .api.v1.urls import urlpatterns as api_v1_urlpatterns

urlpatterns = [
    path('', include(api_v1_urlpatterns)),
]

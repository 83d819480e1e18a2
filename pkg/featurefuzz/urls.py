"""
URL configuration for the featurefuzz result browser.

The admin is the only surface: campaigns and trials loaded with
``manage.py import-ledger`` are browsed there.
"""

from django.contrib import admin
from django.urls import path


admin.site.site_header = "featurefuzz"

urlpatterns = [
    path("admin/", admin.site.urls),
]

from django.contrib import admin
from django.db.models import Count, Q, QuerySet
from django.urls import reverse
from django.utils.html import format_html, urlencode
from django.utils.safestring import SafeText
from unfold.admin import ModelAdmin

from . import models
from .outcomes import CRASH_CLASSES, TIMEOUT_CLASSES, FailureClass


class FailureKindFilter(admin.SimpleListFilter):
    """
    Groups trials by the kind of failure they found.

    Options:
        - Any failure: every class but none
        - Crash: Crash(0), Crash(3), Crash(both)
        - Timeout: Timeout(0), Timeout(3), Timeout(both)
        - Miscompilation
        - Other failure: generator errors, compile errors at either level and
          run timeout divergences
    """

    title = "Failure kind"
    parameter_name = "kind"

    def lookups(self, request, model_admin) -> list[tuple[str, str]]:
        return [
            ("failed", "Any failure"),
            ("crash", "Crash"),
            ("timeout", "Timeout"),
            ("miscompilation", "Miscompilation"),
            ("other", "Other failure"),
        ]

    def queryset(self, request, queryset: QuerySet) -> QuerySet:
        value = self.value()
        if value == "failed":
            return queryset.exclude(failure_class=FailureClass.NONE.value)
        elif value == "crash":
            return queryset.filter(failure_class__in=[choice.value for choice in CRASH_CLASSES])
        elif value == "timeout":
            return queryset.filter(failure_class__in=[choice.value for choice in TIMEOUT_CLASSES])
        elif value == "miscompilation":
            return queryset.filter(failure_class=FailureClass.MISCOMPILATION.value)
        elif value == "other":
            named = CRASH_CLASSES | TIMEOUT_CLASSES | {FailureClass.MISCOMPILATION, FailureClass.NONE}
            return queryset.exclude(failure_class__in=[choice.value for choice in named])
        return queryset


@admin.register(models.Campaign)
class CampaignAdmin(ModelAdmin):
    """
    Imported campaigns with their trial and failure counts.

    The failure count links to the campaign's trials with every
    non-``none`` class.
    """

    list_display = [
        "label",
        "config_mode",
        "trial_count",
        "failures",
        "stop_reason",
        "started_at",
    ]
    list_filter = ["config_mode", "stop_reason"]
    search_fields = ["label__icontains", "ledger_path__icontains"]
    readonly_fields = ["imported_at"]

    def get_queryset(self, request):
        qs = super().get_queryset(request)
        return qs.annotate(failure_count=Count("trials", filter=~Q(trials__failure_class=FailureClass.NONE.value)))

    @admin.display(ordering="failure_count")
    def failures(self, campaign) -> SafeText:
        url = (
            reverse("admin:campaigns_trial_changelist")
            + "?"
            + urlencode({"campaign__id__exact": str(campaign.id), FailureKindFilter.parameter_name: "failed"})
        )
        return format_html("<a href='{}'>{}</a>", url, campaign.failure_count)


@admin.register(models.Trial)
class TrialAdmin(ModelAdmin):
    list_display = ["trial_id", "campaign", "failure_class", "differential", "centroid_index", "program_path"]
    list_filter = [FailureKindFilter, "failure_class", "differential", "campaign"]
    list_select_related = ["campaign"]
    search_fields = ["detail__icontains", "program_path__icontains"]
    readonly_fields = ["outcomes", "flags"]

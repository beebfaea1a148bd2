from django.contrib import admin
from django.db.models import Avg

from .models import SweepRun, TrialResult

import logging

logger = logging.getLogger(__name__)


class TrialResultInline(admin.TabularInline):
    model = TrialResult
    fields = ("sweep_value", "trial", "scheme", "secrecy_rate", "objective_ratio", "ao_iters")
    readonly_fields = fields
    extra = 0
    can_delete = False
    show_change_link = True

    def has_add_permission(self, request, obj=None):
        return False


def mark_failed(modeladmin, request, queryset):
    updated = queryset.update(status=SweepRun.FAILED)
    logger.info(f"Marked {updated} sweep runs as failed")
mark_failed.short_description = "Mark selected runs as failed"


@admin.register(SweepRun)
class SweepRunAdmin(admin.ModelAdmin):
    list_display = ("id", "preset", "sweep_variable", "trials", "base_seed", "status", "result_count", "date_added")
    list_filter = ("status", "preset", "sweep_variable", "date_added")
    search_fields = ("preset", "message")
    readonly_fields = ("config", "date_added", "date_updated")
    inlines = (TrialResultInline,)
    actions = [mark_failed]

    def result_count(self, obj):
        return obj.results.count()
    result_count.short_description = "Results"


@admin.register(TrialResult)
class TrialResultAdmin(admin.ModelAdmin):
    list_display = ("run", "sweep_value", "trial", "scheme", "secrecy_rate", "ao_iters")
    list_filter = ("scheme", "run__sweep_variable", "run")
    search_fields = ("scheme",)
    readonly_fields = ("run", "seed")

    def changelist_view(self, request, extra_context=None):
        response = super().changelist_view(request, extra_context=extra_context)
        try:
            queryset = response.context_data["cl"].queryset
        except (AttributeError, KeyError):
            return response
        response.context_data["mean_rate"] = queryset.aggregate(mean=Avg("secrecy_rate"))["mean"]
        return response
